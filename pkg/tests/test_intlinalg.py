import random
from fractions import Fraction
from itertools import permutations, product

import pytest

from trinoseries import intlinalg as ila
from trinoseries.errors import SingularMatrixError


def brute_force_snf_2x2(M):
    """Search small unimodular C, F with C*M*F diagonal in Smith form."""
    rng = range(-3, 4)
    best = None
    for c in product(rng, repeat=4):
        C = ((c[0], c[1]), (c[2], c[3]))
        if abs(ila.det_int(C)) != 1:
            continue
        for f in product(rng, repeat=4):
            F = ((f[0], f[1]), (f[2], f[3]))
            if abs(ila.det_int(F)) != 1:
                continue
            S = ila.mat_mul(ila.mat_mul(C, M), F)
            if S[0][1] == S[1][0] == 0 and S[0][0] > 0 and S[1][1] > 0:
                if S[1][1] % S[0][0] == 0:
                    if best is None or (S[0][0], S[1][1]) < best:
                        best = (S[0][0], S[1][1])
        if best == (1, abs(ila.det_int(M))):
            break
    return best


def test_identity_snf():
    eye = ila.identity(2)
    snf = ila.smith_normal_form(eye)
    assert snf.C == eye and snf.F == eye and snf.S == eye


def test_sigma_example_snf():
    M = ((2, 1), (1, 2))
    snf = ila.smith_normal_form(M)
    assert snf.diagonal == (1, 3)
    # frozen value from the brute-force unimodular search oracle
    assert brute_force_snf_2x2(M) == (1, 3)
    assert ila.mat_mul(ila.mat_mul(snf.C, M), snf.F) == snf.S


def test_diag_snf():
    snf = ila.smith_normal_form(((4, 0), (0, 4)))
    assert snf.diagonal == (4, 4)


def test_singular_rejected():
    with pytest.raises(SingularMatrixError):
        ila.smith_normal_form(((1, 2), (2, 4)))
    with pytest.raises(SingularMatrixError):
        ila.rational_inverse(((1, 2), (2, 4)))


def test_inverse_examples():
    assert ila.rational_inverse(((4, 0), (0, 4))) == (
        (Fraction(1, 4), Fraction(0)),
        (Fraction(0), Fraction(1, 4)),
    )
    # adjugate oracle: inv = adj/det = (1/3) [[2,-1],[-1,2]]
    assert ila.rational_inverse(((2, 1), (1, 2))) == (
        (Fraction(2, 3), Fraction(-1, 3)),
        (Fraction(-1, 3), Fraction(2, 3)),
    )
    # kappa of the mixed pairing: (1/8) [[4,0],[-1,2]]
    assert ila.rational_inverse(((2, 0), (1, 4))) == (
        (Fraction(1, 2), Fraction(0)),
        (Fraction(-1, 8), Fraction(1, 4)),
    )


def test_det_matches_laplace():
    rng = random.Random(7)

    def laplace(M):
        n = len(M)
        if n == 1:
            return M[0][0]
        out = 0
        for j in range(n):
            minor = tuple(row[:j] + row[j + 1 :] for row in M[1:])
            out += (-1) ** j * M[0][j] * laplace(minor)
        return out

    for _ in range(60):
        n = rng.randint(1, 4)
        M = tuple(tuple(rng.randint(-6, 6) for _ in range(n)) for _ in range(n))
        assert ila.det_int(M) == laplace(M)
        assert ila.det_frac(M) == laplace(M)


def test_random_snf_and_inverse_properties():
    rng = random.Random(123)
    done = 0
    while done < 200:
        n = rng.randint(1, 4)
        M = tuple(tuple(rng.randint(-5, 5) for _ in range(n)) for _ in range(n))
        det = ila.det_int(M)
        if det == 0:
            continue
        done += 1
        snf = ila.smith_normal_form(M)
        assert ila.mat_mul(ila.mat_mul(snf.C, M), snf.F) == snf.S
        q = snf.diagonal
        assert all(q[i + 1] % q[i] == 0 for i in range(n - 1))
        assert all(v > 0 for v in q)
        prod = 1
        for v in q:
            prod *= v
        assert prod == abs(det)
        assert abs(ila.det_int(snf.C)) == 1
        assert abs(ila.det_int(snf.F)) == 1
        inv = ila.rational_inverse(M)
        eye = tuple(
            tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)
        )
        assert ila.mat_mul(inv, M) == eye
        assert inv == ila.adjugate_inverse(M)


def test_solve_frac():
    A = ((2, 1), (1, 2))
    x = ila.solve_frac(A, (1, 1))
    assert x == (Fraction(1, 3), Fraction(1, 3))
    with pytest.raises(SingularMatrixError):
        ila.solve_frac(((1, 1), (2, 2)), (1, 1))
