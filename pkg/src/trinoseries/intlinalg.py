"""Exact integer and rational linear algebra.

Matrices are immutable row-major nested tuples; everywhere in this package the
*columns* of an integer matrix are the meaningful vectors (exponent vectors),
so ``M[r][c]`` is row ``r`` of column vector number ``c``.

Everything here runs on Python ints / fractions.Fraction: intermediate Smith
normal form entries can exceed machine words even for small inputs, so
fixed-width arithmetic is not an option.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import SingularMatrixError

IntMatrix = tuple[tuple[int, ...], ...]
RatMatrix = tuple[tuple[Fraction, ...], ...]


def as_int_matrix(rows) -> IntMatrix:
    M = tuple(tuple(int(v) for v in row) for row in rows)
    n = len(M)
    if n == 0 or any(len(row) != n for row in M):
        raise ValueError("expected a nonempty square matrix")
    return M


def as_rat_matrix(rows) -> RatMatrix:
    return tuple(tuple(Fraction(v) for v in row) for row in rows)


def identity(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(M):
    return tuple(tuple(row[i] for row in M) for i in range(len(M[0])))


def mat_mul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(m)) for j in range(p))
        for i in range(n)
    )


def mat_vec(M, v):
    return tuple(sum(M[i][j] * v[j] for j in range(len(v))) for i in range(len(M)))


def column(M, j):
    return tuple(M[i][j] for i in range(len(M)))


def det_int(M: IntMatrix) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(M)
    a = [list(row) for row in M]
    sign = 1
    prev = 1
    for t in range(n - 1):
        if a[t][t] == 0:
            for i in range(t + 1, n):
                if a[i][t] != 0:
                    a[t], a[i] = a[i], a[t]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(t + 1, n):
            for j in range(t + 1, n):
                a[i][j] = (a[i][j] * a[t][t] - a[i][t] * a[t][j]) // prev
            a[i][t] = 0
        prev = a[t][t]
    return sign * a[n - 1][n - 1]


def det_frac(M) -> Fraction:
    """Exact determinant over the rationals (Gaussian elimination)."""
    n = len(M)
    a = [[Fraction(v) for v in row] for row in M]
    det = Fraction(1)
    for t in range(n):
        pivot = next((i for i in range(t, n) if a[i][t] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != t:
            a[t], a[pivot] = a[pivot], a[t]
            det = -det
        det *= a[t][t]
        inv = 1 / a[t][t]
        for i in range(t + 1, n):
            if a[i][t] != 0:
                f = a[i][t] * inv
                for j in range(t, n):
                    a[i][j] -= f * a[t][j]
    return det


def solve_frac(A, b) -> tuple[Fraction, ...]:
    """Solve A x = b exactly; A square nonsingular over the rationals."""
    n = len(A)
    a = [[Fraction(v) for v in row] + [Fraction(b[i])] for i, row in enumerate(A)]
    for t in range(n):
        pivot = next((i for i in range(t, n) if a[i][t] != 0), None)
        if pivot is None:
            raise SingularMatrixError("linear system is singular")
        a[t], a[pivot] = a[pivot], a[t]
        inv = 1 / a[t][t]
        a[t] = [v * inv for v in a[t]]
        for i in range(n):
            if i != t and a[i][t] != 0:
                f = a[i][t]
                a[i] = [vi - f * vt for vi, vt in zip(a[i], a[t])]
    return tuple(a[i][n] for i in range(n))


def is_unimodular(M: IntMatrix) -> bool:
    return abs(det_int(M)) == 1


@dataclass(frozen=True)
class SnfDecomposition:
    """C * M * F = S with C, F unimodular and S = diag(q_1..q_n), q_j | q_{j+1}."""

    C: IntMatrix
    S: IntMatrix
    F: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.S[i][i] for i in range(len(self.S)))


def _pick_pivot(a, t, n):
    """Minimal nonzero |entry| in the trailing submatrix, lowest (row, col) on ties."""
    best = None
    for i in range(t, n):
        for j in range(t, n):
            v = abs(a[i][j])
            if v != 0 and (best is None or v < best[0]):
                best = (v, i, j)
    return best


def smith_normal_form(M: IntMatrix) -> SnfDecomposition:
    """Smith normal form with unimodular factors, C M F = S.

    Row/column reduction with pivot = minimal nonzero |entry| (ties broken by
    lowest (row, column) index) so the unimodular factors, and hence the
    radical-branch bookkeeping built on them, are deterministic.
    """
    M = as_int_matrix(M)
    n = len(M)
    if det_int(M) == 0:
        raise SingularMatrixError("smith_normal_form requires det(M) != 0")
    a = [list(row) for row in M]
    C = [list(row) for row in identity(n)]
    F = [list(row) for row in identity(n)]

    def row_sub(i, k, q):  # row_i -= q * row_k
        for j in range(n):
            a[i][j] -= q * a[k][j]
            C[i][j] -= q * C[k][j]

    def col_sub(j, k, q):  # col_j -= q * col_k
        for i in range(n):
            a[i][j] -= q * a[i][k]
            F[i][j] -= q * F[i][k]

    def row_swap(i, k):
        a[i], a[k] = a[k], a[i]
        C[i], C[k] = C[k], C[i]

    def col_swap(j, k):
        for i in range(n):
            a[i][j], a[i][k] = a[i][k], a[i][j]
            F[i][j], F[i][k] = F[i][k], F[i][j]

    def row_negate(i):
        for j in range(n):
            a[i][j] = -a[i][j]
            C[i][j] = -C[i][j]

    for t in range(n):
        while True:
            _, pi, pj = _pick_pivot(a, t, n)
            if pi != t:
                row_swap(pi, t)
            if pj != t:
                col_swap(pj, t)
            if a[t][t] < 0:
                row_negate(t)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, n):
                if a[i][t] != 0:
                    row_sub(i, t, a[i][t] // p)
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, n):
                if a[t][j] != 0:
                    col_sub(j, t, a[t][j] // p)
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            # Pivot must divide every remaining entry or the divisibility
            # chain q_j | q_{j+1} can fail downstream.
            offender = None
            for i in range(t + 1, n):
                for j in range(t + 1, n):
                    if a[i][j] % p != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_sub(t, offender, -1)  # add offending row to the pivot row

    snf = SnfDecomposition(
        C=tuple(tuple(r) for r in C),
        S=tuple(tuple(r) for r in a),
        F=tuple(tuple(r) for r in F),
    )
    _check_snf(M, snf)
    return snf


def _check_snf(M, snf):
    n = len(M)
    S = mat_mul(mat_mul(snf.C, M), snf.F)
    if S != snf.S:
        raise AssertionError("SNF internal check failed: C*M*F != S")
    if not (is_unimodular(snf.C) and is_unimodular(snf.F)):
        raise AssertionError("SNF internal check failed: factors not unimodular")
    q = snf.diagonal
    for i in range(n):
        for j in range(n):
            if i != j and snf.S[i][j] != 0:
                raise AssertionError("SNF internal check failed: S not diagonal")
    if any(qi <= 0 for qi in q):
        raise AssertionError("SNF internal check failed: nonpositive invariant factor")
    if any(q[j + 1] % q[j] != 0 for j in range(n - 1)):
        raise AssertionError("SNF internal check failed: divisibility chain broken")


def adjugate_inverse(M: IntMatrix) -> RatMatrix:
    """Inverse by cofactors over the determinant; independent of the SNF route."""
    n = len(M)
    d = det_int(M)
    if d == 0:
        raise SingularMatrixError("matrix is singular")
    if n == 1:
        return ((Fraction(1, d),),)
    inv = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = tuple(
                tuple(M[r][c] for c in range(n) if c != i)
                for r in range(n)
                if r != j
            )
            cof = det_int(minor)
            if (i + j) % 2:
                cof = -cof
            row.append(Fraction(cof, d))
        inv.append(tuple(row))
    return tuple(inv)


def rational_inverse(M: IntMatrix) -> RatMatrix:
    """Exact inverse via F * S^-1 * C from the Smith form, cross-checked against
    the adjugate/determinant route entry by entry."""
    M = as_int_matrix(M)
    n = len(M)
    snf = smith_normal_form(M)
    s_inv = tuple(
        tuple(Fraction(int(i == j), snf.S[i][i] if i == j else 1) for j in range(n))
        for i in range(n)
    )
    via_snf = mat_mul(mat_mul(snf.F, s_inv), snf.C)
    via_adj = adjugate_inverse(M)
    if via_snf != via_adj:
        raise AssertionError("inverse routes disagree (SNF vs adjugate)")
    prod = mat_mul(M, via_snf)
    if prod != tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)):
        raise AssertionError("inverse check failed: M * M^-1 != I")
    return via_snf
