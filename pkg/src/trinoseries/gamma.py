"""Meromorphic gamma-ratio kernel with removable-singularity handling.

The series coefficients in this package are built from ratios Gamma(a)/Gamma(b)
whose arguments can land on the nonpositive integers.  The ratio is treated as
one meromorphic function: if both arguments sit on poles (-m and -n) its value
is the limit (-1)^(n-m) * n!/m!; if only the denominator does, the value is 0;
if only the numerator does, the pole is genuine and PoleError is raised so the
caller can treat the whole coefficient via its limit instead.

Whenever a - b is an integer the ratio is an exact rational (a falling
factorial) and is computed exactly; the float path (log-gamma with reflection
sign bookkeeping) exists for the remaining cases and for cross-checks.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import PoleError


def is_nonpositive_integer(q) -> bool:
    q = Fraction(q)
    return q.denominator == 1 and q <= 0


def _pole_pair_limit(a: Fraction, b: Fraction) -> Fraction:
    # a = -m, b = -n both poles: limit of Gamma(z+a)/Gamma(z+b) as z -> 0.
    m = int(-a)
    n = int(-b)
    val = Fraction(math.factorial(n), math.factorial(m))
    return -val if (n - m) % 2 else val


def gamma_ratio(a, b):
    """Gamma(a)/Gamma(b) under the meromorphic convention.

    Returns an exact Fraction whenever a - b is an integer (including the
    removable pole/pole and zero cases), a float otherwise.
    """
    a = Fraction(a)
    b = Fraction(b)
    pa = is_nonpositive_integer(a)
    pb = is_nonpositive_integer(b)
    if pa and pb:
        return _pole_pair_limit(a, b)
    if pb:
        return Fraction(0)
    if pa:
        raise PoleError(f"Gamma({a}) pole is not cancelled by Gamma({b})")
    k = a - b
    if k.denominator == 1:
        k = int(k)
        out = Fraction(1)
        if k >= 0:
            for j in range(k):
                out *= b + j
        else:
            for j in range(-k):
                out /= a + j
        return out
    return gamma_ratio_float(a, b)


def gamma_signed(x: float) -> float:
    """Gamma(x) for non-pole real x, via lgamma plus the sign on (-k-1, -k)."""
    if x > 0:
        return math.exp(math.lgamma(x))
    sign = -1.0 if math.floor(-x) % 2 == 0 else 1.0
    return sign * math.exp(math.lgamma(x))


def gamma_ratio_float(a, b) -> float:
    """Float version of gamma_ratio with the same pole conventions."""
    a = Fraction(a)
    b = Fraction(b)
    pa = is_nonpositive_integer(a)
    pb = is_nonpositive_integer(b)
    if pa and pb:
        return float(_pole_pair_limit(a, b))
    if pb:
        return 0.0
    if pa:
        raise PoleError(f"Gamma({a}) pole is not cancelled by Gamma({b})")
    af = float(a)
    bf = float(b)
    sign = 1.0
    if af < 0 and math.floor(-af) % 2 == 0:
        sign = -sign
    if bf < 0 and math.floor(-bf) % 2 == 0:
        sign = -sign
    return sign * math.exp(math.lgamma(af) - math.lgamma(bf))


def gamma_ratio_vector(a_vec, b_vec):
    """Product over components of gamma_ratio(a_j, b_j).

    Removable singularities are resolved per index: the construction pairing
    numerator component j against denominator component j is exact here because
    the j-th arguments always differ by an integer in every use in this
    package. PoleError propagates if any component has a genuine pole.
    """
    if len(a_vec) != len(b_vec):
        raise ValueError("argument vectors must have equal length")
    out = Fraction(1)
    for a, b in zip(a_vec, b_vec):
        r = gamma_ratio(a, b)
        if out == 0:
            continue
        out = out * r
    return out
