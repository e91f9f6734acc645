"""Exact Taylor coefficients for monomials of principal solutions.

For a reduction with matrix kappa and shifted-support matrix beta_bar, the
monomial y^d of the principal solution of the reduced system has Taylor
coefficients

    c_k = (-1)^|k| / k! * Gamma(v) / Gamma(v - k + I) * Q(k),
    v = kappa^-1 d + kappa^-1 beta_bar k,
    Q(k) = det( diag[v] - kappa^-1 beta_bar diag[k] ),

with the vector-Gamma ratio taken componentwise.  Every coefficient is an
exact rational: the j-th ratio has integer offset k_j - 1, i.e. it is a
falling factorial.

The implementation folds each ratio into column j of the determinant, which
is algebraically the same expression but total: at k_j = 0 the column
collapses to the j-th unit vector (the 1/v_j pole cancels the column's v_j),
so no removable-singularity case distinctions remain and c_0 = 1 identically.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

from . import intlinalg as ila
from .gamma import gamma_ratio_float
from .systems import Reduction

MultiIndex = tuple[int, ...]


def iter_multi_indices(n: int, max_degree: int):
    """All k in Z^n_{>=0} with |k| <= max_degree, graded-lex order."""
    for total in range(max_degree + 1):
        # combinations_with_replacement of positions -> nondecreasing lists;
        # build counts and emit in lexicographic order within the grade.
        seen = []
        for combo in combinations_with_replacement(range(n), total):
            k = [0] * n
            for pos in combo:
                k[pos] += 1
            seen.append(tuple(k))
        for k in sorted(seen, reverse=False):
            yield k


def _validate(reduction: Reduction, d, k):
    d = tuple(Fraction(v) for v in d)
    if len(d) != reduction.n:
        raise ValueError("d has wrong length")
    if any(v < 0 for v in d):
        raise ValueError("d must be componentwise nonnegative")
    k = tuple(int(v) for v in k)
    if len(k) != reduction.n or any(v < 0 for v in k):
        raise ValueError("k must be a nonnegative multi-index of length n")
    return d, k


def _v_vector(reduction: Reduction, d, k):
    kid = reduction.kappa_inv_d(d)
    kibk = ila.mat_vec(reduction.kib, tuple(Fraction(v) for v in k))
    return tuple(a + b for a, b in zip(kid, kibk))


def q_determinant(reduction: Reduction, d, k) -> Fraction:
    """det( diag[kappa^-1 d + kappa^-1 beta_bar k] - kappa^-1 beta_bar diag[k] )."""
    d, k = _validate(reduction, d, k)
    n = reduction.n
    v = _v_vector(reduction, d, k)
    B = reduction.kib
    M = tuple(
        tuple((v[i] if i == j else Fraction(0)) - B[i][j] * k[j] for j in range(n))
        for i in range(n)
    )
    return ila.det_frac(M)


def taylor_coefficient(reduction: Reduction, d, k) -> Fraction:
    d, k = _validate(reduction, d, k)
    n = reduction.n
    v = _v_vector(reduction, d, k)
    B = reduction.kib
    cols = []
    for j in range(n):
        if k[j] == 0:
            cols.append(tuple(Fraction(int(i == j)) for i in range(n)))
            continue
        ff = Fraction(1)
        for m in range(1, k[j]):
            ff *= v[j] - m
        cols.append(
            tuple(
                ff * ((v[i] if i == j else Fraction(0)) - B[i][j] * k[j])
                for i in range(n)
            )
        )
    M = tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))
    kfact = 1
    for kj in k:
        kfact *= math.factorial(kj)
    sign = -1 if sum(k) % 2 else 1
    return Fraction(sign, kfact) * ila.det_frac(M)


def taylor_coefficient_float(reduction: Reduction, d, k) -> float:
    """Float route (log-gamma ratios times the float Q determinant); exists as
    an independent cross-check of the exact route."""
    d, k = _validate(reduction, d, k)
    v = _v_vector(reduction, d, k)
    ratio = 1.0
    for j in range(reduction.n):
        ratio *= gamma_ratio_float(v[j], v[j] - k[j] + 1)
    q = float(q_determinant(reduction, d, k))
    kfact = 1
    for kj in k:
        kfact *= math.factorial(kj)
    sign = -1.0 if sum(k) % 2 else 1.0
    return sign / kfact * ratio * q


@dataclass
class TaylorSeries:
    """Lazily computed coefficient table for one (reduction, d).

    The memo table relies on the atomicity of dict.setdefault, so concurrent
    insert-if-absent from evaluation workers is safe.
    """

    reduction: Reduction
    d: tuple[Fraction, ...]
    _memo: dict[MultiIndex, Fraction] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.d = tuple(Fraction(v) for v in self.d)

    def coefficient(self, k: MultiIndex) -> Fraction:
        k = tuple(int(v) for v in k)
        got = self._memo.get(k)
        if got is None:
            got = self._memo.setdefault(
                k, taylor_coefficient(self.reduction, self.d, k)
            )
        return got

    def evaluate(self, x, max_degree: int, workers: int = 1) -> complex:
        return evaluate_taylor(self, x, max_degree, workers=workers)


def evaluate_taylor(series: TaylorSeries, x, max_degree: int, workers: int = 1) -> complex:
    """Partial sum over |k| <= max_degree, summed in graded-lex order so float
    results are reproducible bit for bit regardless of worker count."""
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    n = series.reduction.n
    x = tuple(complex(v) for v in x)
    ks = list(iter_multi_indices(n, max_degree))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(series.coefficient, ks))
    total = complex(0)
    for k in ks:
        c = series.coefficient(k)
        if c == 0:
            continue
        term = complex(float(c))
        for xi, ki in zip(x, k):
            term *= xi**ki
        total += term
    return total


def write_coefficients_csv(series: TaylorSeries, max_degree: int, fh, header=None):
    """Columns k_1..k_n, numerator, denominator."""
    n = series.reduction.n
    writer = csv.writer(fh)
    if header:
        fh.write(header)
    writer.writerow([f"k{i + 1}" for i in range(n)] + ["numerator", "denominator"])
    for k in iter_multi_indices(n, max_degree):
        c = series.coefficient(k)
        writer.writerow(list(k) + [c.numerator, c.denominator])
