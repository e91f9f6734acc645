import math
import random
from fractions import Fraction

import pytest

from trinoseries.errors import PoleError
from trinoseries.gamma import (
    gamma_ratio,
    gamma_ratio_float,
    gamma_ratio_vector,
    gamma_signed,
)


def test_pinned_convention_values():
    assert gamma_ratio(-1, 0) == -1
    assert gamma_ratio(Fraction(1, 2), Fraction(3, 2)) == 2
    assert gamma_ratio(-2, -1) == Fraction(-1, 2)


def test_minus2_minus1_matches_numeric_limit():
    # limit of Gamma(z-2)/Gamma(z-1) as z -> 0, via lgamma at small offsets
    for eps in (1e-6, 1e-7):
        val = gamma_ratio_float(
            Fraction(-2) + Fraction(eps).limit_denominator(10**12),
            Fraction(-1) + Fraction(eps).limit_denominator(10**12),
        )
        assert abs(val - (-0.5)) < 1e-5


def test_zero_and_pole_cases():
    assert gamma_ratio(2, 0) == 0
    assert gamma_ratio(Fraction(5, 2), -3) == 0
    with pytest.raises(PoleError):
        gamma_ratio(0, 1)
    with pytest.raises(PoleError):
        gamma_ratio(-4, Fraction(1, 2))


def test_vector_ratio():
    assert gamma_ratio_vector((1, 2), (1, 2)) == 1
    assert gamma_ratio_vector((Fraction(1, 2), -1), (Fraction(3, 2), 0)) == -2
    assert gamma_ratio_vector((3,), (2,)) == 2
    with pytest.raises(PoleError):
        gamma_ratio_vector((0, 1), (1, 1))


def test_exact_vs_float_paths():
    rng = random.Random(99)
    for _ in range(1000):
        b = Fraction(rng.randint(-200, 200), rng.randint(1, 8))
        a = b + rng.randint(-12, 12)
        if abs(a) > 50 or abs(b) > 50:
            continue
        try:
            exact = gamma_ratio(a, b)
        except PoleError:
            with pytest.raises(PoleError):
                gamma_ratio_float(a, b)
            continue
        assert isinstance(exact, Fraction)
        approx = gamma_ratio_float(a, b)
        if exact == 0:
            assert approx == 0
        else:
            assert abs(approx - float(exact)) <= 1e-12 * abs(float(exact))


def test_shift_identity():
    # gamma_ratio(a+1, b+1) = (a/b) gamma_ratio(a, b) where all finite, b != 0
    rng = random.Random(5)
    for _ in range(300):
        a = Fraction(rng.randint(-40, 40), rng.choice((1, 2, 3, 4)))
        b = a - rng.randint(-10, 10)
        if b == 0:
            continue
        try:
            lhs = gamma_ratio(a + 1, b + 1)
            rhs = Fraction(a, b) * gamma_ratio(a, b)
        except PoleError:
            continue
        assert lhs == rhs


def test_falling_factorial_identity():
    # Gamma(a)/Gamma(a-k+1) = (a-1)(a-2)...(a-k+1) for k >= 1
    rng = random.Random(17)
    for _ in range(1000):
        a = Fraction(rng.randint(-60, 60), rng.randint(1, 6))
        k = rng.randint(1, 20)
        expected = Fraction(1)
        for m in range(1, k):
            expected *= a - m
        assert gamma_ratio(a, a - k + 1) == expected


def test_gamma_signed_negative_arguments():
    assert abs(gamma_signed(-0.5) - (-2 * math.sqrt(math.pi))) < 1e-12
    assert abs(gamma_signed(-1.5) - (4 * math.sqrt(math.pi) / 3)) < 1e-12
    assert abs(gamma_signed(4.0) - 6.0) < 1e-12
