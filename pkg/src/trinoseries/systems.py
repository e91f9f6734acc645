"""Reduced trinomial systems, pair selections and reductions.

A system is   y^(omega_i) + x_i * y^(sigma_i) - 1 = 0,  i = 1..n,
stored via two integer matrices whose *columns* are the exponent vectors.
A pair selection fixes, per equation, two of the three support points
{omega_i, sigma_i, 0}; it induces the reduction data (kappa, beta_bar, the
J/L/T partition and the rational matrices phi = kappa^-1 sigma,
psi = kappa^-1 omega) that drive the Puiseux support and the monomial change
of variables between the x-coordinates and the reduced r-coordinates.

All values are immutable and every operation is a pure function.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from fractions import Fraction

from . import intlinalg as ila
from .errors import (
    BranchOutOfRangeError,
    SingularKappaError,
    ZeroCoordinateError,
)

TAG_W0 = "w0"  # (mu, nu) = (omega_i, 0)
TAG_S0 = "s0"  # (mu, nu) = (sigma_i, 0)
TAG_WS = "ws"  # (mu, nu) = (omega_i, sigma_i)
VALID_TAGS = (TAG_W0, TAG_S0, TAG_WS)


def parse_tags(text: str) -> tuple[str, ...]:
    tags = tuple(t.strip().lower() for t in text.split(","))
    for t in tags:
        if t not in VALID_TAGS:
            raise ValueError(f"unknown pair tag {t!r}; expected one of {VALID_TAGS}")
    return tags


@dataclass(frozen=True)
class TrinomialSystem:
    omega: ila.IntMatrix  # column i = omega^(i)
    sigma: ila.IntMatrix  # column i = sigma^(i)

    def __post_init__(self):
        omega = ila.as_int_matrix(self.omega)
        sigma = ila.as_int_matrix(self.sigma)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "sigma", sigma)
        n = len(omega)
        if len(sigma) != n:
            raise ValueError("omega and sigma must have the same dimension")
        if any(v < 0 for row in omega for v in row) or any(
            v < 0 for row in sigma for v in row
        ):
            raise ValueError("supports must lie in the nonnegative orthant")
        if ila.det_int(omega) == 0:
            raise ValueError("omega must be nondegenerate")
        zero = (0,) * n
        for i in range(n):
            w, s = ila.column(omega, i), ila.column(sigma, i)
            if w == s or w == zero or s == zero:
                raise ValueError(
                    f"equation {i + 1}: the exponents omega^(i), sigma^(i), 0 "
                    "must be pairwise distinct"
                )

    @property
    def n(self) -> int:
        return len(self.omega)

    def omega_column(self, i: int) -> tuple[int, ...]:
        return ila.column(self.omega, i)

    def sigma_column(self, i: int) -> tuple[int, ...]:
        return ila.column(self.sigma, i)


def system_from_json(text: str) -> TrinomialSystem:
    """Parse the JSON format {"n":2,"omega":[[4,0],[0,4]],"sigma":[[2,1],[1,2]]}
    where each inner list is a COLUMN (one equation's exponent vector)."""
    data = json.loads(text)
    n = int(data["n"])
    omega_cols = data["omega"]
    sigma_cols = data["sigma"]
    if len(omega_cols) != n or len(sigma_cols) != n:
        raise ValueError("omega/sigma must list n columns")
    omega = tuple(tuple(int(omega_cols[j][i]) for j in range(n)) for i in range(n))
    sigma = tuple(tuple(int(sigma_cols[j][i]) for j in range(n)) for i in range(n))
    return TrinomialSystem(omega, sigma)


def system_to_json(system: TrinomialSystem) -> str:
    """Canonical serialization: parse -> re-serialize is byte-identical."""
    n = system.n
    payload = {
        "n": n,
        "omega": [list(system.omega_column(i)) for i in range(n)],
        "sigma": [list(system.sigma_column(i)) for i in range(n)],
    }
    return json.dumps(payload, sort_keys=True, separators=(", ", ": ")) + "\n"


@dataclass(frozen=True)
class Reduction:
    """A pair selection together with everything derived from it."""

    system: TrinomialSystem
    tags: tuple[str, ...]
    kappa: ila.IntMatrix  # column i = mu^(i) - nu^(i)
    beta_bar: ila.IntMatrix  # column i = beta^(i) - nu^(i)
    j_set: frozenset[int]  # 0-based equation indices tagged w0
    l_set: frozenset[int]  # tagged s0
    t_set: frozenset[int]  # tagged ws
    kappa_inv: ila.RatMatrix
    phi: ila.RatMatrix  # kappa^-1 * sigma
    psi: ila.RatMatrix  # kappa^-1 * omega
    kib: ila.RatMatrix  # kappa^-1 * beta_bar

    @property
    def n(self) -> int:
        return self.system.n

    @property
    def branch_count(self) -> int:
        return abs(ila.det_int(self.kappa))

    def kappa_inv_d(self, d) -> tuple[Fraction, ...]:
        return ila.mat_vec(self.kappa_inv, tuple(Fraction(v) for v in d))


def build_reduction(system: TrinomialSystem, tags) -> Reduction:
    if isinstance(tags, str):
        tags = parse_tags(tags)
    tags = tuple(t.lower() for t in tags)
    n = system.n
    if len(tags) != n:
        raise ValueError(f"expected {n} pair tags, got {len(tags)}")
    kappa_cols = []
    beta_cols = []
    j_set, l_set, t_set = set(), set(), set()
    for i, tag in enumerate(tags):
        w = system.omega_column(i)
        s = system.sigma_column(i)
        if tag == TAG_W0:
            kappa_cols.append(w)
            beta_cols.append(s)  # beta = sigma, nu = 0
            j_set.add(i)
        elif tag == TAG_S0:
            kappa_cols.append(s)
            beta_cols.append(w)  # beta = omega, nu = 0
            l_set.add(i)
        elif tag == TAG_WS:
            kappa_cols.append(tuple(a - b for a, b in zip(w, s)))
            beta_cols.append(tuple(-v for v in s))  # beta = 0, nu = sigma
            t_set.add(i)
        else:
            raise ValueError(f"unknown pair tag {tag!r}")
    kappa = tuple(tuple(kappa_cols[j][i] for j in range(n)) for i in range(n))
    beta_bar = tuple(tuple(beta_cols[j][i] for j in range(n)) for i in range(n))
    if ila.det_int(kappa) == 0:
        raise SingularKappaError(f"selection {tags} gives det(kappa) = 0")
    kappa_inv = ila.rational_inverse(kappa)
    phi = ila.mat_mul(kappa_inv, system.sigma)
    psi = ila.mat_mul(kappa_inv, system.omega)
    kib = ila.mat_mul(kappa_inv, beta_bar)
    return Reduction(
        system=system,
        tags=tags,
        kappa=kappa,
        beta_bar=beta_bar,
        j_set=frozenset(j_set),
        l_set=frozenset(l_set),
        t_set=frozenset(t_set),
        kappa_inv=kappa_inv,
        phi=phi,
        psi=psi,
        kib=kib,
    )


def _pow_principal(value: complex, exponent: Fraction, shift_pi: bool = False) -> complex:
    """value**exponent with the principal log; shift_pi multiplies the value by
    e^{i pi} *before* the power (the literal (-x_t) bookkeeping)."""
    if value == 0:
        raise ZeroCoordinateError("zero coordinate in a fractional power")
    log = cmath.log(value)
    if shift_pi:
        log += 1j * math.pi
    return cmath.exp(float(exponent) * log)


def monomial_change(reduction: Reduction, x) -> tuple[complex, ...]:
    """Coordinates of the monomial transformation r = r(x).

    Three cases by the position of j in the J/L/T partition; fractional powers
    use the principal logarithm (arg in (-pi, pi]) and the (-x_t) factors are
    computed literally as e^{i pi} x_t before taking the power.
    """
    n = reduction.n
    x = tuple(complex(v) for v in x)
    if len(x) != n:
        raise ValueError("x has wrong length")
    if any(v == 0 for v in x):
        raise ZeroCoordinateError("monomial_change requires all x_i != 0")
    L = sorted(reduction.l_set)
    T = sorted(reduction.t_set)
    phi, psi = reduction.phi, reduction.psi
    r = []
    for j in range(n):
        if j in reduction.j_set:
            val = x[j]
            for l in L:
                val *= _pow_principal(x[l], -phi[l][j])
            for t in T:
                val *= _pow_principal(x[t], phi[t][j], shift_pi=True)
        elif j in reduction.l_set:
            val = complex(1)
            for l in L:
                val *= _pow_principal(x[l], -psi[l][j])
            for t in T:
                val *= _pow_principal(x[t], psi[t][j], shift_pi=True)
        else:
            val = complex(-1)
            for l in L:
                val *= _pow_principal(x[l], psi[l][j])
            for t in T:
                val *= _pow_principal(x[t], -psi[t][j], shift_pi=True)
        r.append(val)
    return tuple(r)


def continuation_prefactor(reduction: Reduction, d, x) -> complex:
    """The factor relating y^d(x) to y^d(r):
    prod_L x_l^{-<d, kappa^-1_l>} * prod_T (e^{i pi} x_t)^{<d, kappa^-1_t>}."""
    x = tuple(complex(v) for v in x)
    d = tuple(Fraction(v) for v in d)
    kid = reduction.kappa_inv_d(d)
    out = complex(1)
    for l in sorted(reduction.l_set):
        out *= _pow_principal(x[l], -kid[l])
    for t in sorted(reduction.t_set):
        out *= _pow_principal(x[t], kid[t], shift_pi=True)
    return out


def g_vector(reduction: Reduction, x) -> tuple[complex, ...]:
    """g_i = -a_nu / a_mu for the reduced system's coefficients
    (a_omega = 1, a_sigma = x_i, a_0 = -1)."""
    x = tuple(complex(v) for v in x)
    g = []
    for i in range(reduction.n):
        if i in reduction.j_set:
            g.append(complex(1))
        elif i in reduction.l_set:
            if x[i] == 0:
                raise ZeroCoordinateError("g_i = 1/x_i needs x_i != 0")
            g.append(1 / x[i])
        else:
            g.append(-x[i])
    return tuple(g)


def branch_digits(kappa: ila.IntMatrix, branch: int) -> tuple[int, ...]:
    """Mixed-radix digits (t_1..t_n) of the branch index, radices = the SNF
    invariant factors, t_1 most significant (lexicographic enumeration)."""
    snf = ila.smith_normal_form(kappa)
    radices = snf.diagonal
    total = 1
    for q in radices:
        total *= q
    if not 0 <= branch < total:
        raise BranchOutOfRangeError(f"branch {branch} not in [0, {total})")
    digits = []
    rem = branch
    for q in reversed(radices):
        digits.append(rem % q)
        rem //= q
    return tuple(reversed(digits))


def solve_lambda(kappa: ila.IntMatrix, g, branch: int = 0) -> tuple[complex, ...]:
    """One branch of lambda = g^(kappa^-1), i.e. a solution of
    lambda^(kappa^(i)) = g_i, via the Smith-form radical.

    With C kappa F = S = diag(q), set w_i = (g^(f^(i)))^(1/q_i) (principal
    q_i-th root times the digit's root of unity) and recombine lambda_j =
    prod_i w_i^(C_ij).  There are |det kappa| branches, enumerated by the
    digit vectors in lexicographic order.
    """
    kappa = ila.as_int_matrix(kappa)
    n = len(kappa)
    g = tuple(complex(v) for v in g)
    if any(v == 0 for v in g):
        raise ZeroCoordinateError("solve_lambda requires all g_i != 0")
    snf = ila.smith_normal_form(kappa)
    digits = branch_digits(kappa, branch)
    q = snf.diagonal
    w = []
    for i in range(n):
        prod = complex(1)
        for m in range(n):
            prod *= g[m] ** snf.F[m][i]
        root = cmath.exp(cmath.log(prod) / q[i])
        root *= cmath.exp(2j * math.pi * digits[i] / q[i])
        w.append(root)
    lam = []
    for j in range(n):
        val = complex(1)
        for i in range(n):
            val *= w[i] ** snf.C[i][j]
        lam.append(val)
    return tuple(lam)


def polyhomogeneity_data(reduction: Reduction, x, branch: int = 0):
    """The rescaling (lambda, lambda_0) carrying the x-system onto the reduced
    r-system: lambda solves lambda^(kappa^(i)) = g_i (one radical branch) and
    lambda_0 satisfies lambda_0^(i) lambda^(mu^(i)) a_mu = 1."""
    g = g_vector(reduction, x)
    lam = solve_lambda(reduction.kappa, g, branch)
    lam0 = []
    for i in range(reduction.n):
        if i in reduction.t_set:
            # nu = sigma; use the mu = omega relation, a_omega = 1
            w = reduction.system.omega_column(i)
            val = complex(1)
            for j in range(reduction.n):
                val *= lam[j] ** (-w[j])
            lam0.append(val)
        else:
            lam0.append(complex(1))  # nu = 0, a_0 = -1
    return lam, tuple(lam0)


def branch_phase_exponents(reduction: Reduction, branch: int) -> tuple[Fraction, ...]:
    """theta with lambda_branch = lambda_0branch * e^{2 pi i theta} componentwise:
    theta_j = sum_i (t_i / q_i) C_ij, exact rationals from the SNF digits."""
    snf = ila.smith_normal_form(reduction.kappa)
    digits = branch_digits(reduction.kappa, branch)
    q = snf.diagonal
    n = reduction.n
    return tuple(
        sum((Fraction(digits[i], q[i]) * snf.C[i][j] for i in range(n)), Fraction(0))
        for j in range(n)
    )


def branch_term_phases(reduction: Reduction, d, branch: int):
    """Exact rational phase data for a branch correction of the Puiseux sum.

    Returns (prefactor_exponent, per_index_exponents); the corrected term for
    multi-index k is multiplied by e^{2 pi i (prefactor + <per_index, k>)}.
    """
    theta = branch_phase_exponents(reduction, branch)
    d = tuple(Fraction(v) for v in d)
    pref = sum((dv * th for dv, th in zip(d, theta)), Fraction(0))
    per_index = []
    for j in range(reduction.n):
        if j in reduction.j_set:
            vec = reduction.system.sigma_column(j)
            sign = 1
        elif j in reduction.l_set:
            vec = reduction.system.omega_column(j)
            sign = 1
        else:
            vec = reduction.system.omega_column(j)
            sign = -1
        per_index.append(
            sign * sum((v * th for v, th in zip(vec, theta)), Fraction(0))
        )
    return pref, tuple(per_index)


def rescaled_coefficients(system: TrinomialSystem, x, lam0, lam):
    """Coefficient triples (a_omega, a_sigma, a_0) per equation after the
    rescaling a_alpha -> lambda_0^(i) lambda^alpha a_alpha of the x-system."""
    n = system.n
    x = tuple(complex(v) for v in x)
    out = []
    for i in range(n):
        w = system.omega_column(i)
        s = system.sigma_column(i)
        lw = complex(1)
        ls = complex(1)
        for j in range(n):
            lw *= lam[j] ** w[j]
            ls *= lam[j] ** s[j]
        out.append((lam0[i] * lw, lam0[i] * ls * x[i], -lam0[i]))
    return tuple(out)
