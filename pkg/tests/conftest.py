import random
from fractions import Fraction

import numpy as np
import pytest

from trinoseries.systems import TrinomialSystem, build_reduction


@pytest.fixture
def eq1():
    # y1^4 + x1 y1^2 y2 - 1 = 0,  y2^4 + x2 y1 y2^2 - 1 = 0
    return TrinomialSystem(omega=((4, 0), (0, 4)), sigma=((2, 1), (1, 2)))


@pytest.fixture
def quad():
    # y^2 + x y - 1 = 0
    return TrinomialSystem(omega=((2,),), sigma=((1,),))


@pytest.fixture
def eq1_file(tmp_path, eq1):
    from trinoseries.systems import system_to_json

    path = tmp_path / "eq1.json"
    path.write_text(system_to_json(eq1))
    return str(path)


def random_system(rng: random.Random, n: int, max_entry: int = 4) -> TrinomialSystem:
    """Random valid trinomial system: nonnegative supports, det(omega) != 0,
    per-equation exponents pairwise distinct."""
    while True:
        omega = tuple(
            tuple(rng.randint(0, max_entry) for _ in range(n)) for _ in range(n)
        )
        sigma = tuple(
            tuple(rng.randint(0, max_entry) for _ in range(n)) for _ in range(n)
        )
        try:
            return TrinomialSystem(omega=omega, sigma=sigma)
        except ValueError:
            continue


def random_selection(rng: random.Random, system: TrinomialSystem):
    """Random pair selection with nonsingular kappa."""
    tags = ("w0", "s0", "ws")
    while True:
        sel = tuple(rng.choice(tags) for _ in range(system.n))
        try:
            return build_reduction(system, sel)
        except Exception:
            continue


def random_d(rng: random.Random, n: int):
    return tuple(
        Fraction(rng.randint(1, 6), rng.choice((1, 1, 2, 3))) for _ in range(n)
    )


@pytest.fixture
def seeded_rng():
    return random.Random(20240817)


@pytest.fixture
def np_rng():
    return np.random.default_rng(20240817)
