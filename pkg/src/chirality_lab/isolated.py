"""Isolated classes in SL_3(q) and SU_3(q).

A matrix of SL_3 is isolated when it is conjugate neither to its transpose
nor to its inverse; in SU_3 the transpose is replaced by bar(A)^-1.  Outside
the regular classes with characteristic polynomial (X - alpha)^3, alpha a
primitive cube root of unity, nothing is isolated, so the census only has to
look at the split pieces of those classes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .conjugacy import ConjugacyDecision, decide_sl3, decide_su3, det_norm_group
from .errors import BadCharacteristic, NonPrimeCharacteristic, NotInAmbientGroup, NotPrimitiveCubeRoot
from .ffield import FieldElem, field_of_order, norm_one_subgroup, prime_power, primitive_root_of_unity, \
    quadratic_extension
from .groups import group_classes
from .matrix import SquareMatrix, group_membership, poly_invariants

GROUPS = ("SL3", "SU3")


def _norm_group(group: str) -> str:
    g = group.upper().replace("_", "")
    if g not in GROUPS:
        raise ValueError(f"group must be one of {GROUPS}")
    return g


def _check_q(q: int):
    pp = prime_power(q)
    if pp is None:
        raise NonPrimeCharacteristic(f"{q} is not a prime power")
    if pp[0] in (2, 3):
        raise BadCharacteristic(f"characteristic {pp[0]} is excluded")
    return pp


def _cube_root(F, alpha, ambient_ok) -> FieldElem:
    a = alpha if isinstance(alpha, FieldElem) else F(alpha)
    if a.spec is not F:
        a = F(alpha) if not isinstance(alpha, FieldElem) else None
        if a is None:
            raise NotPrimitiveCubeRoot("alpha lives in the wrong field")
    if a.is_zero() or a * a * a != F.one or a == F.one or not ambient_ok(a):
        raise NotPrimitiveCubeRoot(f"{a} is not a primitive cube root of unity here")
    return a


def primitive_cube_roots(q: int, group: str):
    """All primitive cube roots of unity relevant to the group, canonical order."""
    group = _norm_group(group)
    if group == "SL3":
        F = field_of_order(q)
        return [x for x in F.units() if x.order() == 3]
    return [x for x in norm_one_subgroup(q).elements if x.order() == 3]


def canonical_reps_sl3(q: int, alpha):
    """(A, A1, A2): the Jordan block of alpha and its conjugates by
    diag(alpha, 1, 1) and diag(alpha^2, 1, 1)."""
    _check_q(q)
    F = field_of_order(q)
    if q % 3 != 1:
        raise NotPrimitiveCubeRoot(f"F_{q} has no primitive cube root of unity")
    a = _cube_root(F, alpha, lambda x: True)
    A = SquareMatrix(F, [[a, 1, 0], [0, a, 1], [0, 0, a]])
    out = [A]
    for s in (a, a * a):
        D = SquareMatrix.diag(F, [s, 1, 1])
        out.append(D @ A @ D.inverse())
    return tuple(out)


def canonical_reps_su3(q: int, alpha):
    """(A, A1, A2) with A = [[a, -a^2, -a/(1+a^2)], [0, a, 1], [0, 0, a]] and
    its conjugates by diag(1, a, 1), diag(1, a^2, 1)."""
    _check_q(q)
    if q % 3 != 2:
        raise NotPrimitiveCubeRoot(f"the norm-one group of F_{q * q} has no primitive cube root")
    F = quadratic_extension(q)
    N1 = norm_one_subgroup(q)
    a = _cube_root(F, alpha, lambda x: x in N1)
    one = F.one
    if (one + a * a).is_zero():  # pragma: no cover - excluded by char != 2, 3
        raise NotPrimitiveCubeRoot("1 + alpha^2 vanishes")
    A = SquareMatrix(F, [[a, -(a * a), -a / (one + a * a)], [0, a, 1], [0, 0, a]])
    out = [A]
    for s in (a, a * a):
        D = SquareMatrix.diag(F, [1, s, 1])
        out.append(D @ A @ D.inverse())
    for M in out:
        assert group_membership(M, "SU"), "representative left SU_3"
    return tuple(out)


# -- isolation ------------------------------------------------------------------------

def _maps(group):
    if group == "SL3":
        return {"transpose": lambda M: M.T, "inverse": lambda M: M.inverse(),
                "transpose_inverse": lambda M: M.T.inverse()}
    return {"bar": lambda M: M.bar(), "inverse": lambda M: M.inverse(),
            "bar_inverse": lambda M: M.bar().inverse()}


@dataclass
class IsolationResult:
    isolated: bool
    group: str
    decisions: dict        # map name -> ConjugacyDecision

    def __bool__(self):
        return self.isolated

    def to_dict(self):
        return {"isolated": self.isolated, "group": self.group,
                "decisions": {k: v.to_dict() for k, v in self.decisions.items()}}


def _decide(group, A, B, **kw) -> ConjugacyDecision:
    return decide_sl3(A, B, **kw) if group == "SL3" else decide_su3(A, B, **kw)


def is_isolated(M: SquareMatrix, group: str = "SL3", **kw) -> IsolationResult:
    group = _norm_group(group)
    kind = "SL" if group == "SL3" else "SU"
    if M.n != 3 or not group_membership(M, kind):
        raise NotInAmbientGroup(f"matrix is not in {group}")
    first = "transpose" if group == "SL3" else "bar_inverse"
    maps = _maps(group)
    decisions = {}
    for name in (first, "inverse"):
        decisions[name] = _decide(group, M, maps[name](M), **kw)
        if decisions[name].conjugate:
            return IsolationResult(False, group, decisions)
    return IsolationResult(True, group, decisions)


# -- theorem verdicts ----------------------------------------------------------------

@dataclass
class TheoremVerdict:
    q: int
    group: str
    verdict: str                 # "exists" | "not_exists"
    arithmetic: bool
    roots_of_unity: bool
    trace: dict

    @property
    def exists(self) -> bool:
        return self.verdict == "exists"

    @property
    def consistent(self) -> bool:
        return self.arithmetic == self.roots_of_unity

    def to_dict(self):
        return {"q": self.q, "group": self.group, "verdict": self.verdict, "arithmetic": self.arithmetic,
                "roots_of_unity": self.roots_of_unity, "consistent": self.consistent, "trace": self.trace}


def theorem_verdict(q: int, group: str = "SL3") -> TheoremVerdict:
    """Existence of isolated classes, both as congruences on q and as a
    statement about roots of unity; the two are computed independently."""
    group = _norm_group(group)
    _check_q(q)
    if group == "SL3":
        arith = q % 3 == 1 and q % 9 != 1
        F = field_of_order(q)
        r3 = primitive_root_of_unity(F, 3)
        r9 = primitive_root_of_unity(F, 9)
        roots = r3 is not None and r9 is None
        trace = {"q mod 3": q % 3, "q mod 9": q % 9,
                 "primitive_3rd_root_in_F_q": None if r3 is None else str(r3),
                 "primitive_9th_root_in_F_q": None if r9 is None else str(r9)}
    else:
        arith = q % 3 == 2 and (q * q) % 9 != 1
        r3 = primitive_root_of_unity(norm_one_subgroup(q), 3)
        r9 = primitive_root_of_unity(quadratic_extension(q), 9)
        roots = r3 is not None and r9 is None
        trace = {"q mod 3": q % 3, "q^2 mod 9": (q * q) % 9,
                 "primitive_3rd_root_in_norm_one": None if r3 is None else str(r3),
                 "primitive_9th_root_in_F_q2": None if r9 is None else str(r9)}
    return TheoremVerdict(q, group, "exists" if arith else "not_exists", arith, roots, trace)


# -- census -------------------------------------------------------------------------------

@dataclass
class Relation:
    source: str
    map: str
    target: str
    witness: SquareMatrix

    def to_dict(self):
        return {"source": self.source, "map": self.map, "target": self.target, "witness": str(self.witness)}


@dataclass
class ClassRecord:
    label: str
    alpha: FieldElem
    rep: SquareMatrix
    is_isolated: bool
    certificate: IsolationResult
    same_as: str | None = None          # set when the rep lies in an earlier listed class
    relations: list = field(default_factory=list)

    def to_dict(self):
        return {"label": self.label, "alpha": str(self.alpha), "rep": str(self.rep),
                "is_isolated": self.is_isolated, "same_as": self.same_as,
                "certificate": None if self.certificate is None else self.certificate.to_dict(),
                "relations": [r.to_dict() for r in self.relations]}


@dataclass
class IsolatedReport:
    q: int
    group: str
    mode: str
    alpha_choices: list
    classes: list
    theorem_verdict: TheoremVerdict
    class_count_isolated: int
    oracle: dict | None = None

    def distinct(self):
        return [c for c in self.classes if c.same_as is None]

    def isolated_classes(self):
        return [c for c in self.distinct() if c.is_isolated]

    def record(self, label) -> ClassRecord:
        return next(c for c in self.classes if c.label == label)

    def isolated_labels(self, alpha=None):
        return [c.label for c in self.isolated_classes() if alpha is None or c.alpha == alpha]

    def relation(self, source, map_name):
        rec = self.record(source)
        return next((r for r in rec.relations if r.map == map_name), None)

    def to_dict(self):
        return {"q": self.q, "group": self.group, "mode": self.mode,
                "alpha_choices": [str(a) for a in self.alpha_choices],
                "theorem_verdict": self.theorem_verdict.to_dict(),
                "class_count_isolated": self.class_count_isolated,
                "classes": [c.to_dict() for c in self.classes],
                "oracle": self.oracle}


def _split_reps(q, group, alpha):
    """Representatives of every small-group class inside the big-group class
    of the alpha-Jordan type: the A, A1, A2 triple, completed by conjugates with
    diag entries running over coset representatives of N_A when the triple
    does not reach every coset."""
    if group == "SL3":
        trip = canonical_reps_sl3(q, alpha)
        kind = "GL"
        gen = field_of_order(q).primitive_element
        dets = [alpha ** 0, alpha, alpha * alpha]
        pos = 0
    else:
        trip = canonical_reps_su3(q, alpha)
        kind = "U"
        gen = norm_one_subgroup(q).generator
        dets = [alpha ** 0, alpha, alpha * alpha]
        pos = 1
    suffix = f"(a={alpha})"
    reps = [(f"A{suffix}", trip[0], dets[0]), (f"A1{suffix}", trip[1], dets[1]), (f"A2{suffix}", trip[2], dets[2])]
    N = det_norm_group(trip[0], kind)
    # N_A cosets reached by the triple
    F = trip[0].spec

    def coset(x):
        return min((x * FieldElem(F, n)).idx for n in N.witnesses)

    seen = {coset(d) for _, _, d in reps}
    for k in range(1, N.index):
        s = gen ** k
        if coset(s) in seen:
            continue
        seen.add(coset(s))
        diag = [1, 1, 1]
        diag[pos] = s
        D = SquareMatrix.diag(F, diag)
        reps.append((f"B{k}{suffix}", D @ trip[0] @ D.inverse(), s))
    return reps, N


def enumerate_isolated(q: int, group: str = "SL3", mode: str = "criterion", **kw) -> IsolatedReport:
    """Census of isolated classes.  ``criterion`` walks the split pieces of the
    (X - alpha)^3 classes and decides isolation by the norm criterion;
    ``oracle`` additionally partitions the whole group and compares."""
    group = _norm_group(group)
    _check_q(q)
    tv = theorem_verdict(q, group)
    alphas = primitive_cube_roots(q, group) if (q % 3 == (1 if group == "SL3" else 2)) else []
    classes: list[ClassRecord] = []
    for a in alphas:
        reps, _ = _split_reps(q, group, a)
        for label, M, _ in reps:
            same = next((c.label for c in classes if c.same_as is None and c.alpha == a
                         and _decide(group, c.rep, M, **kw).conjugate), None)
            cert = is_isolated(M, group, **kw) if same is None else None
            iso = cert.isolated if cert is not None else classes[[c.label for c in classes].index(same)].is_isolated
            classes.append(ClassRecord(label, a, M, iso, cert, same))
    distinct = [c for c in classes if c.same_as is None]
    # class-level images under transpose / inverse (or bar / inverse)
    for c in distinct:
        for name, f in _maps(group).items():
            img = f(c.rep)
            key = poly_invariants(img).key()
            for d in distinct:
                if poly_invariants(d.rep).key() != key:
                    continue
                dec = _decide(group, img, d.rep, **kw)
                if dec.conjugate:
                    c.relations.append(Relation(c.label, name, d.label, dec.witness))
                    break
    count = sum(1 for c in distinct if c.is_isolated)
    report = IsolatedReport(q, group, mode, alphas, classes, tv, count)
    if mode == "oracle":
        report.oracle = oracle_census(q, group, report)
    elif mode != "criterion":
        raise ValueError("mode must be criterion or oracle")
    return report


def oracle_census(q: int, group: str, report: IsolatedReport | None = None) -> dict:
    """Isolated classes read off the full class partition of the group."""
    group = _norm_group(group)
    kind = "SL" if group == "SL3" else "SU"
    P = group_classes(kind, q)
    G = P.group
    reps = [P.rep_matrix(c) for c in range(P.count)]
    first = (lambda M: M.T) if group == "SL3" else (lambda M: M.bar().inverse())
    arr_first = np.array([first(M).rows for M in reps], dtype=np.int64)
    arr_inv = np.array([M.inverse().rows for M in reps], dtype=np.int64)
    lab_first = P.labels_of_images(arr_first)
    lab_inv = P.labels_of_images(arr_inv)
    iso = [c for c in range(P.count) if lab_first[c] != c and lab_inv[c] != c]
    out = {"class_count": int(P.count), "group_order": int(len(G)),
           "isolated_count": len(iso), "isolated_reps": [str(reps[c]) for c in iso],
           "isolated_class_sizes": [int(P.sizes[c]) for c in iso]}
    if report is not None:
        crit = sorted(P.label_of(c.rep) for c in report.isolated_classes())
        out["criterion_labels"] = crit
        out["oracle_labels"] = iso
        out["agrees"] = crit == iso
    return out
