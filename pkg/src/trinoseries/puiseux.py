"""Puiseux expansions continuing the Taylor series of y^d(x).

For a reduction with partition J/L/T, the continued series is

    sum_k  c~_k x^(m(k)),   c~_k = e^{i pi p(k)} c_k,   p(k) = sum_T (k_t + m_t(k)),

with support points m(k) given by the three J/L/T cases.  The rational part
of c~_k is the exact Theorem-style Taylor coefficient c_k; the phase is a
root of unity recorded by its exact rational exponent p(k).

Evaluation pins all multivaluedness to one integer dial: x^m uses the
principal logarithm and `branch` selects a lambda-radical branch whose
per-term root-of-unity correction (exact rational phase exponents, affine in
k) is applied on top of the principal sum.  Branch 0 is the literal
principal-branch series.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BranchOutOfRangeError, ZeroCoordinateError
from .systems import Reduction, branch_term_phases
from .taylor import MultiIndex, iter_multi_indices, taylor_coefficient

TWO_PI = 2.0 * math.pi


def support_point(reduction: Reduction, d, k) -> tuple[Fraction, ...]:
    """The exponent vector m(k) of the term indexed by k."""
    n = reduction.n
    d = tuple(Fraction(v) for v in d)
    k = tuple(int(v) for v in k)
    J = sorted(reduction.j_set)
    L = sorted(reduction.l_set)
    T = sorted(reduction.t_set)
    kid = reduction.kappa_inv_d(d)
    phi, psi = reduction.phi, reduction.psi
    m = []
    for j in range(n):
        if j in reduction.j_set:
            m.append(Fraction(k[j]))
            continue
        acc = Fraction(0)
        for jj in J:
            acc += phi[j][jj] * k[jj]
        for ll in L:
            acc += psi[j][ll] * k[ll]
        for tt in T:
            acc -= psi[j][tt] * k[tt]
        acc += kid[j]
        m.append(acc if j in reduction.t_set else -acc)
    return tuple(m)


def phase_exponent(reduction: Reduction, d, k) -> Fraction:
    """p(k) = sum over T of (k_t + m_t(k)); the phase of c~_k is e^{i pi p(k)}."""
    if not reduction.t_set:
        return Fraction(0)
    m = support_point(reduction, d, k)
    return sum((Fraction(k[t]) + m[t] for t in sorted(reduction.t_set)), Fraction(0))


@dataclass(frozen=True)
class PuiseuxCoefficient:
    """c~_k split as exact rational magnitude times the root of unity
    e^{i pi phase}; for T-free reductions the phase is 0."""

    rational: Fraction  # the underlying Taylor coefficient c_k
    phase: Fraction  # p(k); the full coefficient is c_k * e^{i pi p(k)}

    @property
    def value(self) -> complex:
        if self.phase == 0:
            return complex(float(self.rational))
        if self.phase.denominator == 1:
            r = -self.rational if int(self.phase) % 2 else self.rational
            return complex(float(r))
        return float(self.rational) * cmath.exp(1j * math.pi * float(self.phase))

    @property
    def is_real(self) -> bool:
        return self.phase.denominator == 1

    @property
    def real_rational(self) -> Fraction:
        """Exact real value; only defined when the phase is an integer."""
        if self.phase.denominator != 1:
            raise ValueError("coefficient is not real (fractional phase)")
        return -self.rational if int(self.phase) % 2 else self.rational


def puiseux_coefficient(reduction: Reduction, d, k) -> PuiseuxCoefficient:
    c = taylor_coefficient(reduction, d, k)
    p = phase_exponent(reduction, d, k)
    return PuiseuxCoefficient(rational=c, phase=p)


@dataclass
class PuiseuxSeries:
    reduction: Reduction
    d: tuple[Fraction, ...]
    _coeffs: dict[MultiIndex, PuiseuxCoefficient] = field(default_factory=dict, repr=False)
    _support: dict[MultiIndex, tuple[Fraction, ...]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.d = tuple(Fraction(v) for v in self.d)

    @property
    def branch_count(self) -> int:
        return self.reduction.branch_count

    def support(self, k: MultiIndex) -> tuple[Fraction, ...]:
        k = tuple(int(v) for v in k)
        got = self._support.get(k)
        if got is None:
            got = self._support.setdefault(k, support_point(self.reduction, self.d, k))
        return got

    def coefficient(self, k: MultiIndex) -> PuiseuxCoefficient:
        k = tuple(int(v) for v in k)
        got = self._coeffs.get(k)
        if got is None:
            got = self._coeffs.setdefault(
                k, puiseux_coefficient(self.reduction, self.d, k)
            )
        return got

    def evaluate(self, x, max_degree: int, branch: int = 0) -> complex:
        return evaluate_puiseux(self, x, max_degree, branch)


def evaluate_puiseux(series: PuiseuxSeries, x, max_degree: int, branch: int = 0) -> complex:
    """sum_{|k| <= max_degree} c~_k x^(m(k)) with principal-branch powers, the
    chosen lambda-radical branch applied as unit-modulus per-term corrections.
    Terms are summed in graded-lex order (reproducible float results)."""
    red = series.reduction
    n = red.n
    x = tuple(complex(v) for v in x)
    if any(v == 0 for v in x):
        raise ZeroCoordinateError("evaluate_puiseux requires all x_i != 0")
    if not 0 <= branch < red.branch_count:
        raise BranchOutOfRangeError(
            f"branch {branch} not in [0, {red.branch_count})"
        )
    logs = tuple(cmath.log(v) for v in x)
    pref_phase, per_index = branch_term_phases(red, series.d, branch)
    total = complex(0)
    for k in iter_multi_indices(n, max_degree):
        c = series.coefficient(k)
        if c.rational == 0:
            continue
        m = series.support(k)
        expo = sum(float(mj) * lj for mj, lj in zip(m, logs))
        term = c.value * cmath.exp(expo)
        if branch:
            corr = pref_phase + sum(
                (p * kj for p, kj in zip(per_index, k)), Fraction(0)
            )
            corr %= 1
            if corr:
                term *= cmath.exp(1j * TWO_PI * float(corr))
        total += term
    return total


def best_branch(series: PuiseuxSeries, x, max_degree: int, reference: complex):
    """argmin over branches of |series - reference|; returns (branch, value, error).

    The chosen branch index is part of the result, never hidden.
    """
    best = None
    for b in range(series.branch_count):
        val = evaluate_puiseux(series, x, max_degree, b)
        err = abs(val - reference)
        if best is None or err < best[2]:
            best = (b, val, err)
    return best


def write_coefficients_csv(series: PuiseuxSeries, max_degree: int, fh, header=None):
    """Columns k_1..k_n, m_1(k)..m_n(k) as p/q, numerator, denominator, phase."""
    n = series.reduction.n
    writer = csv.writer(fh)
    if header:
        fh.write(header)
    writer.writerow(
        [f"k{i + 1}" for i in range(n)]
        + [f"m{i + 1}" for i in range(n)]
        + ["numerator", "denominator", "phase_exponent"]
    )
    for k in iter_multi_indices(n, max_degree):
        c = series.coefficient(k)
        m = series.support(k)
        writer.writerow(
            list(k)
            + [f"{mi.numerator}/{mi.denominator}" for mi in m]
            + [c.rational.numerator, c.rational.denominator, str(c.phase)]
        )
