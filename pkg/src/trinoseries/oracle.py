"""Independent numeric and exact ground truth for principal solutions.

Two unrelated routes are provided on purpose, so every series engine in this
package can be checked against something that shares none of its code paths:

* Newton continuation from y = (1,..,1) at x = 0 along a (piecewise) straight
  segment, solving in log-coordinates so the y_i never touch zero.  The branch
  of the multivalued solution is defined by the path; tests pin explicit paths.
* Exact truncated power series of the principal solution by undetermined
  coefficients (Fraction arithmetic), and classical Lagrange inversion for
  n = 1.  Both reverse the defining equations directly and never see the
  closed-form coefficient formulas.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from . import intlinalg as ila
from .errors import NoConvergenceError, PathSingularError, ZeroCoordinateError
from .systems import TrinomialSystem
from .taylor import iter_multi_indices

# ----------------------------------------------------------------------------
# Newton continuation
# ----------------------------------------------------------------------------


@dataclass
class ContinuationPath:
    target: tuple[complex, ...]
    steps: int
    tolerance: float
    waypoints: list  # (x, y) pairs actually accepted along the way

    @property
    def solution(self):
        return self.waypoints[-1][1]


def _residual(system: TrinomialSystem, w, x):
    n = system.n
    r = np.empty(n, dtype=complex)
    for i in range(n):
        ew = np.exp(np.dot(system.omega_column(i), w))
        es = np.exp(np.dot(system.sigma_column(i), w))
        r[i] = ew + x[i] * es - 1.0
    return r


def _jacobian(system: TrinomialSystem, w, x):
    n = system.n
    J = np.empty((n, n), dtype=complex)
    for i in range(n):
        ew = np.exp(np.dot(system.omega_column(i), w))
        es = np.exp(np.dot(system.sigma_column(i), w))
        for j in range(n):
            J[i, j] = system.omega[j][i] * ew + x[i] * system.sigma[j][i] * es
    return J


def track(
    system: TrinomialSystem,
    x,
    steps: int = 64,
    tol: float = 1e-12,
    path=None,
    cond_limit: float = 1e12,
    max_newton: int = 40,
) -> ContinuationPath:
    """Track the principal solution from (x=0, y=(1,..,1)) to the target x.

    `path` is an optional list of intermediate waypoints (piecewise-linear
    continuation through them); the default is the straight segment 0 -> x.
    The step is halved whenever Newton needs more than 8 iterations.
    """
    n = system.n
    target = tuple(complex(v) for v in x)
    nodes = [np.zeros(n, dtype=complex)]
    if path is not None:
        nodes.extend(np.asarray(p, dtype=complex) for p in path)
    nodes.append(np.asarray(target, dtype=complex))
    w = np.zeros(n, dtype=complex)
    out = ContinuationPath(
        target=target, steps=steps, tolerance=tol,
        waypoints=[(tuple(nodes[0]), tuple(np.exp(w)))],
    )
    for a, b in zip(nodes[:-1], nodes[1:]):
        t = 0.0
        dt = 1.0 / max(1, steps)
        while t < 1.0 - 1e-15:
            tn = min(1.0, t + dt)
            xn = a + (b - a) * tn
            wn = w.copy()
            ok = False
            for it in range(max_newton):
                r = _residual(system, wn, xn)
                if np.max(np.abs(r)) < tol:
                    ok = True
                    break
                J = _jacobian(system, wn, xn)
                cond = np.linalg.cond(J)
                if not np.isfinite(cond) or cond > cond_limit:
                    raise PathSingularError(
                        f"Jacobian condition number {cond:.3e} exceeds "
                        f"{cond_limit:.1e} near x = {tuple(xn)}"
                    )
                wn = wn - np.linalg.solve(J, r)
            if not ok or it > 8:
                if dt < 1e-12:
                    raise NoConvergenceError(
                        f"continuation stalled at t = {t} towards {tuple(b)}"
                    )
                dt /= 2
                if not ok:
                    continue
            w = wn
            t = tn
            out.waypoints.append((tuple(xn), tuple(np.exp(w))))
            if ok and it <= 3:
                dt = min(dt * 2.0, 1.0)
    return out


def principal_solution(
    system: TrinomialSystem, x, steps: int = 64, tol: float = 1e-12, path=None
):
    """Numeric principal solution y(x); residual of every waypoint < tol."""
    return np.array(track(system, x, steps=steps, tol=tol, path=path).solution)


def residual_norm(system: TrinomialSystem, y, x) -> float:
    y = np.asarray(y, dtype=complex)
    w = np.log(y)
    return float(np.max(np.abs(_residual(system, w, np.asarray(x, dtype=complex)))))


def monomial_of_solution(y, d) -> complex:
    """prod y_i^(d_i), principal-branch powers for fractional d_i."""
    out = complex(1)
    for yi, di in zip(y, d):
        yi = complex(yi)
        if yi == 0:
            raise ZeroCoordinateError("monomial undefined at y_i = 0")
        di = Fraction(di)
        if di.denominator == 1:
            out *= yi ** int(di)
        else:
            out *= cmath.exp(float(di) * cmath.log(yi))
    return out


# ----------------------------------------------------------------------------
# General trinomial tracking (used by the polyhomogeneity rescaling check)
# ----------------------------------------------------------------------------


def track_general(system: TrinomialSystem, coeffs_at, y_start, steps=64, tol=1e-12):
    """Track a solution of sum_alpha a_alpha^(i) y^alpha = 0 (supports of the
    given system) while the coefficient triples (a_omega, a_sigma, a_0) move
    along coeffs_at : [0,1] -> triples; y_start solves the t=0 system."""
    n = system.n
    w = np.log(np.asarray(y_start, dtype=complex))

    def res_jac(w, triples):
        r = np.empty(n, dtype=complex)
        J = np.empty((n, n), dtype=complex)
        for i in range(n):
            aw, as_, a0 = triples[i]
            ew = np.exp(np.dot(system.omega_column(i), w))
            es = np.exp(np.dot(system.sigma_column(i), w))
            r[i] = aw * ew + as_ * es + a0
            for j in range(n):
                J[i, j] = aw * system.omega[j][i] * ew + as_ * system.sigma[j][i] * es
        return r, J

    t = 0.0
    dt = 1.0 / max(1, steps)
    while t < 1.0 - 1e-15:
        tn = min(1.0, t + dt)
        triples = coeffs_at(tn)
        wn = w.copy()
        ok = False
        for it in range(40):
            r, J = res_jac(wn, triples)
            if np.max(np.abs(r)) < tol:
                ok = True
                break
            wn = wn - np.linalg.solve(J, r)
        if not ok or it > 8:
            if dt < 1e-12:
                raise NoConvergenceError("general tracking stalled")
            dt /= 2
            if not ok:
                continue
        w = wn
        t = tn
    return np.exp(w)


def reduced_coefficient_triples(reduction, r, scale=1.0):
    """(a_omega, a_sigma, a_0) per equation of the reduced system at
    coefficients scale * r: y^mu - y^nu + r_j y^beta = 0 in the three
    J/L/T shapes."""
    out = []
    for j in range(reduction.n):
        rj = complex(r[j]) * scale
        if j in reduction.j_set:
            out.append((1.0, rj, -1.0))
        elif j in reduction.l_set:
            out.append((rj, 1.0, -1.0))
        else:
            out.append((1.0, -1.0, rj))
    return tuple(out)


def principal_solution_reduced(reduction, r, steps: int = 64, tol: float = 1e-12):
    """Numeric principal solution of the reduced system at coefficients r,
    tracked from (r=0, y=(1,..,1)) along the straight segment."""
    n = reduction.n
    y0 = np.ones(n, dtype=complex)
    return track_general(
        reduction.system,
        lambda t: reduced_coefficient_triples(reduction, r, scale=t),
        y0,
        steps=steps,
        tol=tol,
    )


# ----------------------------------------------------------------------------
# Exact truncated multivariate power series (undetermined coefficients)
# ----------------------------------------------------------------------------

Series = dict  # multi-index tuple -> Fraction, truncated by total degree


def _series_mul(a: Series, b: Series, max_deg: int) -> Series:
    out: Series = {}
    for ka, va in a.items():
        if va == 0:
            continue
        da = sum(ka)
        for kb, vb in b.items():
            if vb == 0 or da + sum(kb) > max_deg:
                continue
            key = tuple(x + y for x, y in zip(ka, kb))
            out[key] = out.get(key, Fraction(0)) + va * vb
    return out


def _series_pow_int(a: Series, e: int, max_deg: int, n: int) -> Series:
    out: Series = {(0,) * n: Fraction(1)}
    base = dict(a)
    while e:
        if e & 1:
            out = _series_mul(out, base, max_deg)
        e >>= 1
        if e:
            base = _series_mul(base, base, max_deg)
    return out


def _series_log1p(u: Series, max_deg: int, n: int) -> Series:
    # log(1 + u) for u with zero constant term
    out: Series = {}
    term: Series = {(0,) * n: Fraction(1)}
    for m in range(1, max_deg + 1):
        term = _series_mul(term, u, max_deg)
        if not term:
            break
        c = Fraction((-1) ** (m + 1), m)
        for key, val in term.items():
            out[key] = out.get(key, Fraction(0)) + c * val
    return out


def _series_exp(u: Series, max_deg: int, n: int) -> Series:
    out: Series = {(0,) * n: Fraction(1)}
    term: Series = {(0,) * n: Fraction(1)}
    for m in range(1, max_deg + 1):
        term = _series_mul(term, u, max_deg)
        if not term:
            break
        c = Fraction(1, math.factorial(m))
        for key, val in term.items():
            out[key] = out.get(key, Fraction(0)) + c * val
    return out


def _series_pow_frac(s: Series, alpha: Fraction, max_deg: int, n: int) -> Series:
    # s has constant term 1; s^alpha = exp(alpha * log s)
    if alpha.denominator == 1:
        e = int(alpha)
        if e >= 0:
            return _series_pow_int(s, e, max_deg, n)
    u = dict(s)
    u[(0,) * n] = u.get((0,) * n, Fraction(0)) - 1
    u = {k: v for k, v in u.items() if v != 0}
    logs = _series_log1p(u, max_deg, n)
    scaled = {k: alpha * v for k, v in logs.items()}
    return _series_exp(scaled, max_deg, n)


def principal_series(system: TrinomialSystem, max_degree: int) -> list[Series]:
    """Exact Taylor series of the principal solution coordinates, solved order
    by order from the defining equations (coefficients of x^k give a linear
    system with matrix omega^T, nonsingular by assumption)."""
    n = system.n
    y = [{(0,) * n: Fraction(1)} for _ in range(n)]
    omega_t = ila.transpose(system.omega)
    for deg in range(1, max_degree + 1):
        # residual of the current truncation at order `deg`
        resid = {}
        for i in range(n):
            yw: Series = {(0,) * n: Fraction(1)}
            ys: Series = {(0,) * n: Fraction(1)}
            for j in range(n):
                if system.omega[j][i]:
                    yw = _series_mul(
                        yw, _series_pow_int(y[j], system.omega[j][i], deg, n), deg
                    )
                if system.sigma[j][i]:
                    ys = _series_mul(
                        ys, _series_pow_int(y[j], system.sigma[j][i], deg, n), deg
                    )
            # P_i = y^omega_i + x_i y^sigma_i - 1
            p = dict(yw)
            for key, val in ys.items():
                if sum(key) + 1 > deg:
                    continue
                lifted = tuple(v + int(m == i) for m, v in enumerate(key))
                p[lifted] = p.get(lifted, Fraction(0)) + val
            p[(0,) * n] = p.get((0,) * n, Fraction(0)) - 1
            resid[i] = p
        for k in (kk for kk in iter_multi_indices(n, deg) if sum(kk) == deg):
            rhs = tuple(-resid[i].get(k, Fraction(0)) for i in range(n))
            if all(v == 0 for v in rhs):
                continue
            corr = ila.solve_frac(omega_t, rhs)
            for j in range(n):
                if corr[j] != 0:
                    y[j][k] = y[j].get(k, Fraction(0)) + corr[j]
    return y


def monomial_series(system: TrinomialSystem, d, max_degree: int) -> Series:
    """Exact Taylor series of y^d = prod y_j^(d_j)."""
    n = system.n
    d = tuple(Fraction(v) for v in d)
    y = principal_series(system, max_degree)
    out: Series = {(0,) * n: Fraction(1)}
    for j in range(n):
        if d[j] == 0:
            continue
        out = _series_mul(
            out, _series_pow_frac(y[j], d[j], max_degree, n), max_degree
        )
    return out


def lagrange_series_univariate(omega: int, sigma: int, d, max_degree: int) -> list[Fraction]:
    """n = 1 coefficients of y^d via classical Lagrange inversion.

    With x(y) = (1 - y^omega) / y^sigma and y(0) = 1, the inversion theorem
    gives, for any analytic H,
        H(y(x)) = H(1) + sum_{m>=1} x^m/m! * [D^{m-1} (H'(y) ((y-1)/x(y))^m)]_{y=1}.
    All arithmetic is exact on truncated univariate series in (y - 1).
    """
    d = Fraction(d)
    N = max_degree

    def u_mul(a, b, trunc):
        out = [Fraction(0)] * (trunc + 1)
        for i, va in enumerate(a):
            if va == 0:
                continue
            for j, vb in enumerate(b):
                if vb == 0 or i + j > trunc:
                    continue
                out[i + j] += va * vb
        return out

    def u_pow(a, e, trunc):
        out = [Fraction(1)] + [Fraction(0)] * trunc
        for _ in range(e):
            out = u_mul(out, a, trunc)
        return out

    def u_inv(a, trunc):
        # reciprocal of a series with a[0] != 0
        out = [Fraction(0)] * (trunc + 1)
        out[0] = 1 / a[0]
        for m in range(1, trunc + 1):
            s = Fraction(0)
            for j in range(1, m + 1):
                if j < len(a):
                    s += a[j] * out[m - j]
            out[m] = -s / a[0]
        return out

    trunc = N + 2
    # x(y) in powers of t = y - 1:  (1 - (1+t)^omega) / (1+t)^sigma
    one_t = [Fraction(1), Fraction(1)] + [Fraction(0)] * trunc
    pw = u_pow(one_t[: trunc + 1], omega, trunc)
    num = [-v for v in pw]
    num[0] += 1  # 1 - (1+t)^omega ; vanishes at t = 0
    ps = u_pow(one_t[: trunc + 1], sigma, trunc)
    x_of_t = u_mul(num, u_inv(ps, trunc), trunc)
    # phi(t) = t / x(t), analytic with phi(0) = 1/x'(0) = -1/omega
    x_shift = x_of_t[1:] + [Fraction(0)]
    phi = u_inv(x_shift, trunc)
    # H(y) = y^d -> H'(y) = d y^(d-1); expand around t = 0 exactly
    coeffs = [Fraction(1)]
    for m in range(1, N + 1):
        phim = u_pow(phi, m, trunc)
        # H'(1+t) = d (1+t)^(d-1) as a truncated binomial series
        hp = []
        binom = d
        term = Fraction(1)
        for j in range(trunc + 1):
            hp.append(d * term)
            term = term * (d - 1 - j) / (j + 1)
        w = u_mul(hp, phim, trunc)
        # [D^{m-1} w]_{t=0} = (m-1)! * w_{m-1}
        coeffs.append(Fraction(1, m) * w[m - 1])
    return coeffs


def reference_coefficient(system: TrinomialSystem, d, k, method: str = "series"):
    """k-th Taylor coefficient of y^d at 0 by an independent route.

    method = "series": exact multivariate reversion (Fraction).
    method = "lagrange": exact classical Lagrange inversion (n = 1 only).
    method = "finite_differences": Richardson-extrapolated central differences
    of the Newton-continuation oracle (float).
    """
    k = tuple(int(v) for v in k)
    if method == "series":
        s = monomial_series(system, d, sum(k))
        return s.get(k, Fraction(0))
    if method == "lagrange":
        if system.n != 1:
            raise ValueError("lagrange inversion route is univariate only")
        return lagrange_series_univariate(
            system.omega[0][0], system.sigma[0][0], d[0], k[0]
        )[k[0]]
    if method == "finite_differences":
        return _finite_difference_coefficient(system, d, k)
    raise ValueError(f"unknown method {method!r}")


def _monomial_value(system, d, x, tol):
    y = principal_solution(system, x, steps=8, tol=tol)
    return monomial_of_solution(y, d)


def _central_difference(system, d, k, h, tol):
    n = system.n
    total = complex(0)
    ranges = [range(ki + 1) for ki in k]
    for js in product(*ranges):
        w = 1.0
        for ki, ji in zip(k, js):
            w *= math.comb(ki, ji)
        if sum(js) % 2:
            w = -w
        x = [(ki / 2.0 - ji) * h for ki, ji in zip(k, js)]
        total += w * _monomial_value(system, d, x, tol)
    return total / h ** sum(k)


def _finite_difference_coefficient(
    system: TrinomialSystem, d, k, step: float = 1e-3, tol: float = 1e-13
):
    if sum(k) == 0:
        return 1.0
    d1 = _central_difference(system, d, k, step, tol)
    d2 = _central_difference(system, d, k, step / 2.0, tol)
    deriv = (4.0 * d2 - d1) / 3.0  # Richardson on the O(h^2) error term
    kfact = 1
    for ki in k:
        kfact *= math.factorial(ki)
    val = deriv / kfact
    return val.real if abs(val.imag) < 1e-9 * (1 + abs(val.real)) else val
