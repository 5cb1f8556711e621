"""Conjugacy decisions in SL_3 / SU_3, determinant subgroups N_A and witnesses.

Oracles: N_A over F_3 and F_5 from a plain numpy scan of every 3x3 matrix,
N_A in U_3(3) from the enumerated group, and SL/SU verdicts from brute force."""

import random

import numpy as np
import pytest

from chirality_lab.conjugacy import (brute_force_conjugator, centralizer_basis, decide, decide_sl3, decide_su3,
                                     det_norm_group, gl_conjugator, is_real, splitting_count, unitary_conjugator)
from chirality_lab.errors import NotInAmbientGroup, SizeCapExceeded, WitnessSearchExhausted
from chirality_lab.ffield import field_of_order, norm_one_subgroup, quadratic_extension
from chirality_lab.groups import enumerate_group
from chirality_lab.isolated import canonical_reps_sl3, canonical_reps_su3
from chirality_lab.matrix import SquareMatrix, group_membership, random_invertible


# -- independent oracle for N_A over prime fields ------------------------------------

_ALL = {}


def _all_matrices(p):
    if p not in _ALL:
        idx = np.arange(p ** 9)
        digits = np.stack([(idx // p ** k) % p for k in range(9)], axis=1)
        _ALL[p] = digits.reshape(-1, 3, 3)
    return _ALL[p]


def _det(M, p):
    return (M[:, 0, 0] * (M[:, 1, 1] * M[:, 2, 2] - M[:, 1, 2] * M[:, 2, 1])
            - M[:, 0, 1] * (M[:, 1, 0] * M[:, 2, 2] - M[:, 1, 2] * M[:, 2, 0])
            + M[:, 0, 2] * (M[:, 1, 0] * M[:, 2, 1] - M[:, 1, 1] * M[:, 2, 0])) % p


def _oracle_dets(A, p):
    a = np.array(A.rows)
    M = _all_matrices(p)
    comm = ((M @ a) % p == (a @ M) % p).all(axis=(1, 2))
    d = _det(M[comm], p)
    return sorted(set(d[d != 0].tolist()))


def _sl3(F, rng):
    M = random_invertible(F, 3, rng)
    return SquareMatrix.diag(F, [M.det().inverse(), 1, 1]) @ M


@pytest.mark.parametrize("p", [3, 5])
def test_det_norm_group_matches_exhaustive_numpy_scan(p):
    F = field_of_order(p)
    rng = random.Random(p)
    mats = [SquareMatrix.identity(F), SquareMatrix.diag(F, [1, 1, 2]), SquareMatrix.diag(F, [1, 2, 2]),
            SquareMatrix(F, [[1, 1, 0], [0, 1, 0], [0, 0, 1]]), SquareMatrix(F, [[1, 1, 0], [0, 1, 1], [0, 0, 1]])]
    mats += [random_invertible(F, 3, rng) for _ in range(6)]
    for A in mats:
        want = _oracle_dets(A, p)
        for cap in (10 ** 6, 1):          # exhaustive / filtration, then forced sampling
            N = det_norm_group(A, "GL", scan_cap=cap, seed=7)
            assert [x.idx for x in N.elements()] == want
            assert N.index * N.order == p - 1
            for x in N.elements():
                W = N.witness(x)
                assert W @ A == A @ W and W.det() == x


def test_det_norm_group_unitary_matches_enumeration():
    U = enumerate_group("U", 3, 3)
    K = U.F
    rng = np.random.default_rng(0)
    vf = U.vf
    picks = [int(i) for i in rng.choice(len(U), size=12, replace=False)]
    reps = [U.matrix(i) for i in picks] + [SquareMatrix.identity(K)]
    for A in reps:
        a = np.array(A.rows)
        comm = (vf.matmul(U.elems, a) == vf.matmul(a[None], U.elems)).all(axis=(1, 2))
        want = sorted(set(vf.det3(U.elems[comm]).tolist()))
        for cap in (10 ** 6, 1):
            N = det_norm_group(A, "U", scan_cap=cap, seed=3)
            assert [x.idx for x in N.elements()] == want, (A, cap)
            assert N.ambient == "F1" and N.ambient_order == 4


def test_sl3_antidiagonal_witness_q7():
    A, A1, A2 = canonical_reps_sl3(7, 2)
    F = A.spec
    dec = decide_sl3(A1, A2.T)
    assert dec.conjugate
    # antidiag(-1, -a^2, -a) with a = 2
    assert dec.witness == SquareMatrix.antidiag(F, [-1, -4, -2])
    assert dec.witness.det() == 1
    N = det_norm_group(A1)
    assert [x.idx for x in N.elements()] == [1, 6] and N.index == 3


def test_sl3_triple_transposes_q7():
    A, A1, A2 = canonical_reps_sl3(7, 2)
    assert decide_sl3(A, A.T).conjugate
    assert not decide_sl3(A1, A1.T).conjugate
    assert not decide_sl3(A1, A1.inverse()).conjugate
    assert not decide_sl3(A2, A2.T).conjugate
    d = decide_sl3(A1, A2)
    assert not d.conjugate and d.method == "norm_criterion" and d.connecting_det not in d.norm_data
    assert decide_sl3(A, A).witness == SquareMatrix.identity(A.spec)


def test_su3_diagonal_witness_q5():
    A, A1, A2 = canonical_reps_su3(5, norm_one_subgroup(5).elements[2])
    K = A.spec
    dec = decide_su3(A1, A1.bar().inverse())
    assert dec.conjugate
    assert dec.witness == SquareMatrix.diag(K, [-1, 1, -1])
    assert not decide_su3(A, A.bar().inverse()).conjugate
    assert not decide_su3(A, A.inverse()).conjugate


@pytest.mark.parametrize("q", [5, 7])
def test_decide_sl3_agrees_with_brute_force(q):
    F = field_of_order(q)
    G = enumerate_group("SL", q, 3)
    rng = random.Random(q)
    nrng = np.random.default_rng(q)
    pairs = []
    for _ in range(12):
        X = G.matrix(int(nrng.integers(len(G))))
        h = random_invertible(F, 3, rng)
        pairs += [(X, h @ X @ h.inverse()), (X, X.T), (X, _sl3(F, rng))]
    for A, B in pairs:
        dec = decide_sl3(A, B)
        bf = brute_force_conjugator(A, B, "SL", q)
        assert dec.conjugate == (bf is not None)
        if dec.conjugate:
            assert dec.witness @ A == B @ dec.witness and group_membership(dec.witness, "SL")
        # symmetric relation
        assert decide_sl3(B, A).conjugate == dec.conjugate


def test_decide_su3_agrees_with_brute_force_q3():
    G = enumerate_group("SU", 3, 3)
    U = enumerate_group("U", 3, 3)
    rng = np.random.default_rng(5)
    for _ in range(25):
        X = G.matrix(int(rng.integers(len(G))))
        Y = G.matrix(int(rng.integers(len(G))))
        h = U.matrix(int(rng.integers(len(U))))
        for B in (h @ X @ h.inverse(), Y, X.bar().inverse()):
            dec = decide_su3(X, B)
            assert dec.conjugate == (brute_force_conjugator(X, B, "SU", 3) is not None)
            if dec.conjugate:
                assert dec.witness @ X == B @ dec.witness and group_membership(dec.witness, "SU")


def test_unitary_conjugator_is_unitary():
    U = enumerate_group("U", 5, 3)
    rng = np.random.default_rng(11)
    for _ in range(15):
        X = U.matrix(int(rng.integers(len(U))))
        h = U.matrix(int(rng.integers(len(U))))
        B = h @ X @ h.inverse()
        g = unitary_conjugator(X, B)
        assert g is not None and group_membership(g, "U") and g @ X == B @ g


def test_unitary_conjugator_cap():
    K = quadratic_extension(5)
    z = norm_one_subgroup(5).generator
    A = SquareMatrix.diag(K, [z, z, z ** 4])
    h = SquareMatrix.antidiag(K, [1, 1, 1])
    with pytest.raises(WitnessSearchExhausted):
        unitary_conjugator(A, h @ A @ h.inverse(), scan_cap=1, enum_cap=1)


def test_gl_conjugator_and_centralizer():
    F = field_of_order(7)
    assert gl_conjugator(SquareMatrix.identity(F), SquareMatrix.diag(F, [2, 1, 1])) is None
    J = SquareMatrix(F, [[2, 1, 0], [0, 2, 1], [0, 0, 2]])
    g = gl_conjugator(J, J.T)
    assert g @ J == J.T @ g
    assert len(centralizer_basis(J)) == 3
    assert len(centralizer_basis(SquareMatrix.identity(F))) == 9


def test_splitting_counts():
    F7 = field_of_order(7)
    assert splitting_count(canonical_reps_sl3(7, 2)[0]) == 3
    assert splitting_count(SquareMatrix(field_of_order(5), [[1, 1, 0], [0, 1, 1], [0, 0, 1]])) == 1
    assert splitting_count(SquareMatrix.identity(F7)) == 1
    A = canonical_reps_su3(5, norm_one_subgroup(5).elements[2])[0]
    assert splitting_count(A, "U/SU") == 3
    with pytest.raises(NotInAmbientGroup):
        splitting_count(SquareMatrix.diag(F7, [2, 1, 1]))


def test_is_real():
    A, A1, _ = canonical_reps_sl3(7, 2)
    F = A.spec
    assert not is_real(A1, "SL")
    assert is_real(SquareMatrix.diag(F, [-1, -1, 1]), "SL")
    assert is_real(SquareMatrix(F, [[1, 1, 0], [0, 1, 1], [0, 0, 1]]), "SL")
    # in SU_3(5) the eigenvalue of A1 differs from that of its inverse
    S1 = canonical_reps_su3(5, norm_one_subgroup(5).elements[2])[1]
    assert not is_real(S1, "SU")


def test_decide_errors():
    F = field_of_order(7)
    with pytest.raises(NotInAmbientGroup):
        decide_sl3(SquareMatrix.diag(F, [2, 1, 1]), SquareMatrix.identity(F))
    with pytest.raises(SizeCapExceeded):
        brute_force_conjugator(SquareMatrix.identity(F), SquareMatrix.identity(F), "SL", enum_cap=10)
    assert decide(SquareMatrix.identity(F), SquareMatrix.identity(F), "GL").conjugate
    with pytest.raises(ValueError):
        decide(SquareMatrix.identity(F), SquareMatrix.identity(F), "Sp")
