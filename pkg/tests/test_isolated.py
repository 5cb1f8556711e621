"""Canonical representatives, isolation tests, theorem verdicts and censuses."""

import itertools

import numpy as np
import pytest
from sympy import GF, Matrix
from sympy.polys.matrices import DomainMatrix

from chirality_lab.errors import BadCharacteristic, NonPrimeCharacteristic, NotInAmbientGroup, NotPrimitiveCubeRoot
from chirality_lab.ffield import field_of_order, norm_one_subgroup, quadratic_extension
from chirality_lab.groups import vec_field
from chirality_lab.isolated import (canonical_reps_sl3, canonical_reps_su3, enumerate_isolated, is_isolated,
                                    primitive_cube_roots, theorem_verdict)
from chirality_lab.matrix import SquareMatrix, group_membership, intertwiner_basis
from chirality_lab.verify import admissible


def test_sl3_representatives_q7():
    A, A1, A2 = canonical_reps_sl3(7, 2)
    assert str(A) == "2,1,0;0,2,1;0,0,2"
    assert str(A1) == "2,2,0;0,2,1;0,0,2"
    assert str(A2) == "2,4,0;0,2,1;0,0,2"
    assert all(group_membership(M, "SL") for M in (A, A1, A2))


@pytest.mark.parametrize("q", [5, 11, 17, 23])
def test_su3_representative_corner_entry_is_one(q):
    for a in primitive_cube_roots(q, "SU3"):
        A, A1, A2 = canonical_reps_su3(q, a)
        K = A.spec
        assert A[0, 2] == K.one
        for M in (A, A1, A2):
            assert group_membership(M, "SU")


def test_representative_errors():
    with pytest.raises(NotPrimitiveCubeRoot):
        canonical_reps_sl3(5, 2)
    with pytest.raises(NotPrimitiveCubeRoot):
        canonical_reps_sl3(7, 3)
    with pytest.raises(NotPrimitiveCubeRoot):
        canonical_reps_su3(7, 2)
    with pytest.raises(BadCharacteristic):
        canonical_reps_sl3(9, 2)
    with pytest.raises(NonPrimeCharacteristic):
        theorem_verdict(12)
    with pytest.raises(NotInAmbientGroup):
        is_isolated(SquareMatrix.diag(field_of_order(7), [2, 1, 1]))


def test_is_isolated_examples():
    A, A1, A2 = canonical_reps_sl3(7, 2)
    assert not is_isolated(A)
    assert is_isolated(A1) and is_isolated(A2)
    S, S1, S2 = canonical_reps_su3(5, primitive_cube_roots(5, "SU3")[0])
    assert is_isolated(S, "SU3") and is_isolated(S2, "SU3")
    res = is_isolated(S1, "SU3")
    assert not res and res.decisions["bar_inverse"].conjugate
    assert res.decisions["bar_inverse"].witness == SquareMatrix.diag(S.spec, [-1, 1, -1])


@pytest.mark.parametrize("q,group,verdict", [
    (7, "SL3", "exists"), (13, "SL3", "exists"), (19, "SL3", "not_exists"), (5, "SL3", "not_exists"),
    (5, "SU3", "exists"), (11, "SU3", "exists"), (17, "SU3", "not_exists"), (7, "SU3", "not_exists"),
    (25, "SL3", "exists"), (49, "SL3", "exists"),
])
def test_theorem_verdict_examples(q, group, verdict):
    assert theorem_verdict(q, group).verdict == verdict


@pytest.mark.parametrize("group", ["SL3", "SU3"])
def test_theorem_phrasings_agree(group):
    for q in admissible(200):
        tv = theorem_verdict(q, group)
        assert tv.consistent
        assert tv.arithmetic == (q % 9 in ((4, 7) if group == "SL3" else (2, 5)))


def test_census_q7_sl3():
    r = enumerate_isolated(7, "SL3")
    assert r.theorem_verdict.exists
    assert sorted(r.isolated_labels()) == ["A1(a=2)", "A1(a=4)", "A2(a=2)", "A2(a=4)"]
    rel = r.relation("A1(a=2)", "transpose")
    w = rel.witness
    A1, A2 = r.record("A1(a=2)").rep, r.record("A2(a=2)").rep
    assert rel.target == "A2(a=2)" and w @ A1.T @ w.inverse() == A2 and w.det() == 1
    # the isolated set is closed under transpose and inverse
    iso = set(r.isolated_labels())
    for c in r.isolated_classes():
        for x in c.relations:
            assert x.target in iso


@pytest.mark.parametrize("q", [5, 11, 23])
def test_census_su3_exists(q):
    r = enumerate_isolated(q, "SU3")
    for a in r.alpha_choices:
        assert {c.label.split("(")[0] for c in r.isolated_classes() if c.alpha == a} == {"A", "A2"}


@pytest.mark.parametrize("q,group", [(13, "SL3"), (31, "SL3"), (11, "SU3"), (23, "SU3"), (29, "SU3")])
def test_census_agrees_with_criterion_away_from_cube_alpha(q, group):
    r = enumerate_isolated(q, group)
    assert r.theorem_verdict.exists
    assert r.class_count_isolated == 4


@pytest.mark.parametrize("q,group", [(19, "SL3"), (37, "SL3"), (17, "SU3")])
def test_census_finds_isolated_classes_when_alpha_is_a_cube(q, group):
    # The split triple collapses to one class here and the two remaining
    # split classes are isolated; the congruence criterion says not_exists.
    r = enumerate_isolated(q, group)
    assert not r.theorem_verdict.exists
    labels = sorted(c.label.split("(")[0] for c in r.isolated_classes())
    assert labels == ["B1", "B1", "B2", "B2"]
    for a in r.alpha_choices:
        assert r.record(f"A1(a={a})").same_as == f"A(a={a})"


def _no_det_one_intertwiner(A, B, p):
    """Independent scan: sympy nullspace over GF(p), then every point."""
    rows = []
    a, b = Matrix(A.rows), Matrix(B.rows)
    for i in range(3):
        for j in range(3):
            row = [0] * 9
            for k in range(3):
                row[i * 3 + k] += int(a[k, j])
                row[k * 3 + j] -= int(b[i, k])
            rows.append([GF(p)(x) for x in row])
    ns = DomainMatrix(rows, (9, 9), GF(p)).nullspace().to_Matrix()
    basis = [[int(x) % p for x in ns.row(r)] for r in range(ns.rows)]
    if not basis or ns.cols == 0:
        return True
    assert len(basis) == 3
    for c in itertools.product(range(p), repeat=len(basis)):
        X = [sum(ci * v[t] for ci, v in zip(c, basis)) % p for t in range(9)]
        M = Matrix(3, 3, X)
        if M.det() % p == 1:
            return False
    return True


def test_q19_split_class_is_isolated_by_independent_scan():
    F = field_of_order(19)
    B = SquareMatrix(F, [[7, 2, 0], [0, 7, 1], [0, 0, 7]])
    assert _no_det_one_intertwiner(B, B.T, 19)
    # B^-1 has eigenvalue a^2 != a, so not even a GL intertwiner exists
    assert _no_det_one_intertwiner(B, B.inverse(), 19)
    assert intertwiner_basis(B, B.inverse()) == []
    assert is_isolated(B)


@pytest.mark.slow
def test_q17_su3_split_class_is_isolated_by_scan():
    K = quadratic_extension(17)
    vf = vec_field(K)
    B = enumerate_isolated(17, "SU3").record(f"B1(a={primitive_cube_roots(17, 'SU3')[0]})").rep
    form = np.array(SquareMatrix.antidiag(K, [1, 1, 1]).rows)
    assert intertwiner_basis(B, B.inverse()) == []
    for target in (B.bar().inverse(),):
        basis = np.array([X.rows for X in intertwiner_basis(B, target)])
        assert len(basis) == 3
        Q = K.order
        c0 = np.arange(Q)
        for c2 in range(Q):
            for c1 in range(Q):
                M = vf.add(vf.mul(c0[:, None, None], basis[0][None]),
                           vf.add(vf.mul(np.full((Q, 1, 1), c1), basis[1][None]),
                                  vf.mul(np.full((Q, 1, 1), c2), basis[2][None])))
                ok = vf.det3(M) == 1
                if ok.any():
                    Mu = M[ok]
                    lhs = vf.matmul(vf.matmul(np.transpose(Mu, (0, 2, 1)), form), vf.bar(Mu))
                    assert not (lhs == form).all(axis=(1, 2)).any()


def test_census_oracle_mode_su3_q5():
    r = enumerate_isolated(5, "SU3", mode="oracle")
    assert r.oracle["agrees"]
    assert r.oracle["isolated_count"] == r.class_count_isolated == 4
    assert r.oracle["class_count"] == 40


def test_primitive_cube_roots():
    assert [x.idx for x in primitive_cube_roots(7, "SL3")] == [2, 4]
    assert primitive_cube_roots(5, "SL3") == []
    assert [str(x) for x in primitive_cube_roots(5, "SU3")] == ["2+t", "2+4*t"]
    with pytest.raises(ValueError):
        primitive_cube_roots(5, "Sp4")
