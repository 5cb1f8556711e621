"""Conjugacy decisions in GL_3, SL_3, U_3 and SU_3 with explicit witnesses.

Splitting of a GL (resp. U) class into SL (resp. SU) classes is governed by
the subgroup N_A of determinants of centralizer elements: g1 A g1^-1 and
g2 A g2^-1 are conjugate in the smaller group iff det(g1)/det(g2) lies in N_A.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import NotInAmbientGroup, SizeCapExceeded, WitnessSearchExhausted
from .ffield import FieldElem, FieldSpec, NormOneGroup, norm_one_subgroup
from .groups import DEFAULT_ENUM_CAP, TABLE_LIMIT, all_vectors, enumerate_group, order_sl, order_su, order_u, \
    scan_conjugator, vec_field
from .matrix import SquareMatrix, combine, frobenius_basis, group_membership, intertwiner_basis, poly_invariants, \
    standard_form

DEFAULT_SCAN_CAP = 10 ** 6
STABLE_SAMPLES = 64


# -- GL level ---------------------------------------------------------------------

def gl_conjugator(A: SquareMatrix, B: SquareMatrix) -> SquareMatrix | None:
    """g in GL with g A g^-1 = B, or None when the invariant factors differ."""
    A._same(B)
    PA, fa = frobenius_basis(A)
    PB, fb = frobenius_basis(B)
    if tuple(f.c for f in fa) != tuple(f.c for f in fb):
        return None
    g = PB @ PA.inverse()
    assert g @ A == B @ g
    return g


def centralizer_basis(A: SquareMatrix):
    """Linear basis of {X : X A = A X}."""
    return intertwiner_basis(A, A)


def _regular_eigenvalue(A: SquareMatrix):
    """lambda if A is regular with characteristic polynomial (X - lambda)^n, else None."""
    inv = poly_invariants(A)
    if not inv.is_regular():
        return None
    chi = inv.char_poly
    F, n = A.spec, A.n
    if n % F.p:
        lam = FieldElem(F, F.mul(F.neg(chi.c[n - 1]), F.inv(F(n).idx)))
        cands = [lam]
    else:
        cands = chi.roots()[:1]
    for lam in cands:
        from .poly import Poly
        if (Poly.linear(F, lam) ** n) == chi:
            return lam
    return None


class _Filtration:
    """Coordinates in the basis 1, N, ..., N^{n-1} of the centralizer of a
    regular matrix A = lambda + N."""

    def __init__(self, A: SquareMatrix, lam: FieldElem):
        F, n = A.spec, A.n
        self.F, self.n = F, n
        N = A - SquareMatrix.identity(F, n).scale(lam)
        self.powers = [SquareMatrix.identity(F, n)]
        for _ in range(1, n):
            self.powers.append(self.powers[-1] @ N)
        top = self.powers[-1]
        j = next(j for j in range(n) if any(top.rows[i][j] for i in range(n)))
        v = [1 if i == j else 0 for i in range(n)]
        cols = [P.apply(v) for P in self.powers]
        self.v = v
        self.Pinv = SquareMatrix._raw(F, [[cols[c][r] for c in range(n)] for r in range(n)]).inverse()

    def coords(self, M: SquareMatrix):
        return self.Pinv.apply(M.apply(self.v))

    def element(self, y) -> SquareMatrix:
        return combine(self.powers, y, self.F, self.n)


def _sigma(M: SquareMatrix, form: SquareMatrix, form_inv: SquareMatrix) -> SquareMatrix:
    """Adjoint for the hermitian form: form^-1 bar(M)^T form."""
    return form_inv @ M.bar().T @ form


def _filtered_unitary_points(A, lam, X0, form, want_all_first_level=False):
    """Solutions X = X0 Y, Y in the centralizer of A, of sigma(X) X = I.

    sigma(Y) H Y = I with H = sigma(X0) X0 is triangular in the filtration
    coordinates of Y, so the unknowns are fixed one at a time.  Returns the
    first solution in canonical order, or with ``want_all_first_level`` one
    solution for every admissible leading coordinate.
    """
    F, n = A.spec, A.n
    fil = _Filtration(A, lam)
    form_inv = form.inverse()
    H = _sigma(X0, form, form_inv) @ X0
    sig = [_sigma(P, form, form_inv) for P in fil.powers]
    T = [[fil.coords(sig[i] @ H @ fil.powers[j]) for j in range(n)] for i in range(n)]
    bar = F.bar_index
    add, mul = F.add, F.mul
    units = range(1, F.order)
    allv = range(F.order)

    def level_value(y, k):
        acc = 0
        for i in range(k + 1):
            bi = bar(y[i]) if y[i] else 0
            if not bi:
                continue
            for j in range(k + 1):
                if y[j]:
                    t = T[i][j][k]
                    if t:
                        acc = add(acc, mul(bi, mul(y[j], t)))
        return acc

    def extend(y, k):
        if k == n:
            return list(y)
        target = 1 if k == 0 else 0
        for v in (units if k == 0 else allv):
            y[k] = v
            if level_value(y, k) == target:
                got = extend(y, k + 1)
                if got is not None:
                    return got
        y[k] = 0
        return None

    if not want_all_first_level:
        y = extend([0] * n, 0)
        return None if y is None else X0 @ fil.element(y)
    out = []
    for v in units:
        y = [v] + [0] * (n - 1)
        if level_value(y, 0) == 1:
            full = extend(y, 1)
            if full is not None:
                out.append(X0 @ fil.element(full))
    return out


def _backtrack_unitary(basis, form, n, F, cap):
    """First invertible X = sum x_i basis_i (canonical order in the chosen
    variable order) with X^T form bar(X) = form, pruning on every entry of the
    hermitian condition as soon as its variables are fixed."""
    d = len(basis)
    touch = [{j for j in range(n) for i in range(n) if Bm.rows[i][j]} for Bm in basis]
    order = sorted(range(d), key=lambda i: (max(touch[i]) if touch[i] else -1, i))
    basis = [basis[i] for i in order]
    touch = [touch[i] for i in order]
    last = [-1] * n
    for k, cols in enumerate(touch):
        for c in cols:
            last[c] = k
    checks = [[] for _ in range(d)]
    for k in range(n):
        for l in range(n):
            lvl = max(last[k], last[l])
            if lvl >= 0:
                checks[lvl].append((k, l))
    # columns never touched are zero; they make X singular
    if min(last) < 0:
        return None
    fr = form.rows
    bar = F.bar_index
    add, mul = F.add, F.mul
    counter = [0]

    def entry(X, k, l):
        # (X^T form bar X)_{kl} = sum_{i,j} X_ik form_ij bar(X_jl)
        acc = 0
        for i in range(n):
            xik = X[i][k]
            if not xik:
                continue
            for j in range(n):
                f = fr[i][j]
                if f and X[j][l]:
                    acc = add(acc, mul(mul(xik, f), bar(X[j][l])))
        return acc

    def rec(k, X):
        if k == d:
            M = SquareMatrix._raw(F, X)
            return M if M.det() else None
        Bk = basis[k].rows
        for v in range(F.order):
            counter[0] += 1
            if counter[0] > cap:
                raise WitnessSearchExhausted(f"unitary witness scan exceeded {cap} points")
            Xn = [[add(X[i][j], mul(v, Bk[i][j])) if Bk[i][j] else X[i][j] for j in range(n)] for i in range(n)]
            if all(entry(Xn, a, b) == fr[a][b] for a, b in checks[k]):
                got = rec(k + 1, Xn)
                if got is not None:
                    return got
        return None

    return rec(0, [[0] * n for _ in range(n)])


def unitary_conjugator(A: SquareMatrix, B: SquareMatrix, form: SquareMatrix | None = None,
                       scan_cap: int = DEFAULT_SCAN_CAP, enum_cap: int = DEFAULT_ENUM_CAP,
                       parallelism: int = 0) -> SquareMatrix | None:
    """g in U with g A g^-1 = B (A, B unitary), or None if not conjugate.

    U-conjugacy coincides with GL(q^2)-conjugacy, so the GL witness decides
    existence; a unitary point of the intertwiner space is then searched for.
    """
    form = form if form is not None else standard_form(A.spec, A.n)
    g = gl_conjugator(A, B)
    if g is None:
        return None
    lam = _regular_eigenvalue(A)
    if lam is not None:
        X = _filtered_unitary_points(A, lam, g, form)
        if X is not None:
            return X
    try:
        X = _backtrack_unitary(intertwiner_basis(A, B), form, A.n, A.spec, scan_cap)
        if X is not None:
            return X
    except WitnessSearchExhausted:
        pass
    q = A.spec.base_order
    if A.n != 3 or order_u(3, q) > enum_cap or A.spec.order > TABLE_LIMIT:
        raise WitnessSearchExhausted("no unitary witness within caps")
    G = enumerate_group("U", q, 3, enum_cap)
    i = scan_conjugator(G, A, B, parallelism)
    if i < 0:  # pragma: no cover - contradicts the U/GL class correspondence
        raise WitnessSearchExhausted("GL-conjugate but no unitary conjugator found")
    return G.matrix(i)


# -- determinant subgroups -------------------------------------------------------

@dataclass
class DetNormSubgroup:
    ambient: str                      # "F*" or "F1"
    generator: FieldElem
    index: int
    ambient_order: int
    method: str
    witnesses: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def order(self) -> int:
        return self.ambient_order // self.index

    def __contains__(self, x: FieldElem) -> bool:
        return x.idx in self.witnesses

    def elements(self):
        F = self.generator.spec
        return sorted(FieldElem(F, i) for i in self.witnesses)

    def witness(self, x: FieldElem) -> SquareMatrix:
        """A centralizer element with determinant x."""
        return self.witnesses[x.idx]

    def to_dict(self):
        return {"ambient": self.ambient, "generator": str(self.generator), "index": self.index,
                "order": self.order, "method": self.method}


def _close(witnesses, F, new_items, mul_matrix=True):
    """Close a det -> matrix table under products with ``new_items``."""
    changed = False
    frontier = list(new_items)
    while frontier:
        d, M = frontier.pop()
        if d in witnesses:
            continue
        witnesses[d] = M
        changed = True
        for d2, M2 in list(witnesses.items()):
            prod = F.mul(d, d2)
            if prod not in witnesses:
                frontier.append((prod, M @ M2))
    return changed


def _subgroup_summary(F, witnesses, ambient, ambient_order, method):
    # generator: canonically least element of maximal order in the set
    gen = max((FieldElem(F, d) for d in witnesses), key=lambda x: (x.order(), -x.idx))
    return DetNormSubgroup(ambient, gen, ambient_order // len(witnesses), ambient_order, method, witnesses)


def _exhaustive_dets(basis, F, n, unitary, form):
    """det -> witness over every point of span(basis), vectorised for n = 3."""
    d = len(basis)
    Q = F.order
    out = {}
    if n == 3 and Q <= TABLE_LIMIT:
        vf = vec_field(F)
        Bs = np.array([Bm.rows for Bm in basis], dtype=np.int64)
        coeffs = all_vectors(Q, d)
        step = 200_000
        for s in range(0, len(coeffs), step):
            c = coeffs[s:s + step]
            M = np.zeros((len(c), n, n), dtype=np.int64)
            for i in range(d):
                M = vf.add(M, vf.mul(c[:, i, None, None], Bs[i][None, :, :]))
            dets = vf.det3(M)
            ok = dets != 0
            if unitary:
                lhs = vf.matmul(vf.matmul(np.transpose(M, (0, 2, 1)), np.array(form.rows)), vf.bar(M))
                ok &= (lhs == np.array(form.rows)).all(axis=(1, 2))
            for dv in np.unique(dets[ok]).tolist():
                if dv not in out:
                    i = int(np.nonzero(ok & (dets == dv))[0][0])
                    out[dv] = SquareMatrix._raw(F, M[i].tolist())
        return out
    for c in itertools.product(range(Q), repeat=d):
        M = combine(basis, c, F, n)
        dv = M.det().idx
        if dv and dv not in out and (not unitary or group_membership(M, "U", form)):
            out[dv] = M
    return out


def det_norm_group(A: SquareMatrix, ambient_kind: str = "GL", form: SquareMatrix | None = None,
                   scan_cap: int = DEFAULT_SCAN_CAP, seed: int = 0) -> DetNormSubgroup:
    """N_A = det of the centralizer of A in GL (subgroup of F^*) or in U
    (subgroup of the norm-one group)."""
    F, n = A.spec, A.n
    kind = ambient_kind.upper()
    if kind not in ("GL", "U"):
        raise ValueError("ambient_kind must be GL or U")
    unitary = kind == "U"
    if unitary:
        form = form if form is not None else standard_form(F, n)
        if not group_membership(A, "U", form):
            raise NotInAmbientGroup("matrix is not unitary")
        N1 = norm_one_subgroup(F.base_order)
        ambient, ambient_order = "F1", N1.order
    else:
        if not A.det():
            raise NotInAmbientGroup("matrix is singular")
        ambient, ambient_order = "F*", F.order - 1

    lam = _regular_eigenvalue(A)
    if lam is not None:
        if unitary:
            pts = _filtered_unitary_points(A, lam, SquareMatrix.identity(F, n), form, want_all_first_level=True)
        else:
            pts = [SquareMatrix.identity(F, n).scale(FieldElem(F, v)) for v in range(1, F.order)]
        wit = {}
        for M in pts:
            wit.setdefault(M.det().idx, M)
        return _subgroup_summary(F, wit, ambient, ambient_order, "filtration")

    basis = centralizer_basis(A)
    d = len(basis)
    if F.order ** d <= scan_cap:
        wit = _exhaustive_dets(basis, F, n, unitary, form)
        return _subgroup_summary(F, wit, ambient, ambient_order, "exhaustive")

    # sampling: scalars first, then seeded random centralizer points until the
    # generated subgroup is stable for STABLE_SAMPLES consecutive draws
    rng = random.Random(seed)
    wit = {}
    if unitary:
        z = N1.generator
        seedpts = [SquareMatrix.identity(F, n).scale(z)]
    else:
        g = F.primitive_element
        seedpts = [SquareMatrix.identity(F, n).scale(g)]
    _close(wit, F, [(M.det().idx, M) for M in seedpts] + [(1, SquareMatrix.identity(F, n))])
    form_inv = form.inverse() if unitary else None
    stable = 0
    I = SquareMatrix.identity(F, n)
    while stable < STABLE_SAMPLES and len(wit) < ambient_order:
        M = combine(basis, [rng.randrange(F.order) for _ in range(d)], F, n)
        if unitary:
            # Cayley transform of a skew element is unitary and still central
            K = M - _sigma(M, form, form_inv)
            if not (I + K).det():
                stable += 1
                continue
            Z = (I - K) @ (I + K).inverse()
        else:
            if not M.det():
                stable += 1
                continue
            Z = M
        if _close(wit, F, [(Z.det().idx, Z)]):
            stable = 0
        else:
            stable += 1
    return _subgroup_summary(F, wit, ambient, ambient_order, "sampled")


def splitting_count(A: SquareMatrix, pair: str = "GL/SL", form=None) -> int:
    """Number of SL (SU) classes inside the GL (U) class of A: the index of N_A."""
    big = pair.upper().split("/")[0]
    if big not in ("GL", "U"):
        raise ValueError("pair must be GL/SL or U/SU")
    small = "SL" if big == "GL" else "SU"
    if not group_membership(A, small, form):
        raise NotInAmbientGroup(f"matrix is not in {small}")
    return det_norm_group(A, big, form).index


# -- SL / SU decisions ----------------------------------------------------------------

@dataclass
class ConjugacyDecision:
    verdict: str                       # "conjugate" | "not_conjugate"
    witness: SquareMatrix | None
    method: str                        # "invariant_factors" | "norm_criterion" | "brute_force"
    group: str
    norm_data: DetNormSubgroup | None = None
    connecting_det: FieldElem | None = None

    @property
    def conjugate(self) -> bool:
        return self.verdict == "conjugate"

    def __bool__(self):
        return self.conjugate

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "group": self.group,
            "method": self.method,
            "witness": None if self.witness is None else str(self.witness),
            "connecting_det": None if self.connecting_det is None else str(self.connecting_det),
            "norm_data": None if self.norm_data is None else self.norm_data.to_dict(),
        }


def decide_sl3(A: SquareMatrix, B: SquareMatrix, scan_cap: int = DEFAULT_SCAN_CAP, seed: int = 0) -> ConjugacyDecision:
    for M in (A, B):
        if not group_membership(M, "SL"):
            raise NotInAmbientGroup("input is not in SL")
    group = f"SL{A.n}({A.spec.order})"
    g = gl_conjugator(A, B)
    if g is None:
        return ConjugacyDecision("not_conjugate", None, "invariant_factors", group)
    N = det_norm_group(A, "GL", scan_cap=scan_cap, seed=seed)
    delta = g.det()
    if delta not in N:
        return ConjugacyDecision("not_conjugate", None, "norm_criterion", group, N, delta)
    w = g @ N.witness(delta).inverse()
    assert w @ A == B @ w and w.det() == 1
    return ConjugacyDecision("conjugate", w, "norm_criterion", group, N, delta)


def decide_su3(A: SquareMatrix, B: SquareMatrix, form: SquareMatrix | None = None,
               scan_cap: int = DEFAULT_SCAN_CAP, enum_cap: int = DEFAULT_ENUM_CAP, seed: int = 0,
               parallelism: int = 0) -> ConjugacyDecision:
    form = form if form is not None else standard_form(A.spec, A.n)
    for M in (A, B):
        if not group_membership(M, "SU", form):
            raise NotInAmbientGroup("input is not in SU")
    group = f"SU{A.n}({A.spec.base_order})"
    g = unitary_conjugator(A, B, form, scan_cap, enum_cap, parallelism)
    if g is None:
        return ConjugacyDecision("not_conjugate", None, "invariant_factors", group)
    N = det_norm_group(A, "U", form, scan_cap=scan_cap, seed=seed)
    delta = g.det()
    if delta not in N:
        return ConjugacyDecision("not_conjugate", None, "norm_criterion", group, N, delta)
    w = g @ N.witness(delta).inverse()
    assert w @ A == B @ w and w.det() == 1 and group_membership(w, "U", form)
    return ConjugacyDecision("conjugate", w, "norm_criterion", group, N, delta)


def _group_order(kind, n, q):
    if kind == "SL":
        return order_sl(n, q)
    if kind == "SU":
        return order_su(n, q)
    return order_u(n, q)


def brute_force_conjugator(A: SquareMatrix, B: SquareMatrix, kind: str, q: int | None = None,
                           enum_cap: int = DEFAULT_ENUM_CAP, parallelism: int = 0) -> SquareMatrix | None:
    """Canonically least g in the enumerated group with g A g^-1 = B."""
    kind = kind.upper()
    if q is None:
        q = A.spec.order if kind == "SL" else A.spec.base_order
    size = _group_order(kind, A.n, q)
    if size > enum_cap:
        raise SizeCapExceeded(f"|{kind}{A.n}({q})| = {size} exceeds cap {enum_cap}")
    G = enumerate_group(kind, q, A.n, enum_cap)
    i = scan_conjugator(G, A, B, parallelism)
    return None if i < 0 else G.matrix(i)


def decide(A: SquareMatrix, B: SquareMatrix, kind: str, **kw) -> ConjugacyDecision:
    kind = kind.upper()
    if kind == "SL":
        return decide_sl3(A, B, **kw)
    if kind == "SU":
        return decide_su3(A, B, **kw)
    if kind == "GL":
        if not (A.det() and B.det()):
            raise NotInAmbientGroup("input is singular")
        g = gl_conjugator(A, B)
        return ConjugacyDecision("conjugate" if g is not None else "not_conjugate", g, "invariant_factors",
                                 f"GL{A.n}({A.spec.order})")
    if kind == "U":
        for M in (A, B):
            if not group_membership(M, "U", kw.get("form")):
                raise NotInAmbientGroup("input is not in U")
        g = unitary_conjugator(A, B, **kw)
        return ConjugacyDecision("conjugate" if g is not None else "not_conjugate", g, "invariant_factors",
                                 f"U{A.n}({A.spec.base_order})")
    raise ValueError(f"unknown group kind {kind!r}")


def is_real(A: SquareMatrix, kind: str = "SL", **kw) -> bool:
    """A conjugate to A^-1 inside the group."""
    return decide(A, A.inverse(), kind, **kw).conjugate
