"""Chirality criterion for G_2(q) and a Zorn vector-matrix model of the split
octonions, on which SL_3(q) acts by algebra automorphisms."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import BadCharacteristic, DimensionMismatch, NonPrimeCharacteristic, NotInAmbientGroup, ParseError
from .ffield import FieldElem, FieldSpec, prime_power
from .isolated import (IsolationResult, canonical_reps_sl3, canonical_reps_su3, enumerate_isolated, is_isolated,
                       primitive_cube_roots, theorem_verdict)
from .matrix import SquareMatrix, group_membership


@dataclass
class ChiralityVerdict:
    q: int
    case1: bool
    case2: bool
    case1_roots: bool
    case2_roots: bool
    witness_source: str                 # "SL3" | "SU3" | "none"
    witness_class: SquareMatrix | None
    witness_certificate: IsolationResult | None
    census_isolated_count: int | None = None

    @property
    def chiral(self) -> bool:
        return self.case1 or self.case2

    @property
    def consistent(self) -> bool:
        """Congruence phrasing agrees with the roots-of-unity phrasing."""
        return self.case1 == self.case1_roots and self.case2 == self.case2_roots

    @property
    def census_agrees(self) -> bool | None:
        if self.census_isolated_count is None:
            return None
        return self.chiral == (self.census_isolated_count > 0)

    def to_dict(self):
        return {
            "q": self.q, "case1": self.case1, "case2": self.case2, "chiral": self.chiral,
            "roots_of_unity": {"case1": self.case1_roots, "case2": self.case2_roots},
            "consistent": self.consistent,
            "witness_source": self.witness_source,
            "witness_class": None if self.witness_class is None else str(self.witness_class),
            "witness_certificate": None if self.witness_certificate is None else self.witness_certificate.to_dict(),
            "census_isolated_count": self.census_isolated_count,
            "census_agrees": self.census_agrees,
        }


def chirality_verdict(q: int, census: bool = False, **kw) -> ChiralityVerdict:
    """Criterion verdict for G_2(q).  With ``census`` the isolated classes of
    the relevant SL_3 / SU_3 are also counted, which exposes any disagreement
    between the criterion and the classes actually present."""
    pp = prime_power(q)
    if pp is None:
        raise NonPrimeCharacteristic(f"{q} is not a prime power")
    if pp[0] in (2, 3):
        raise BadCharacteristic(f"characteristic {pp[0]} is excluded")
    sl = theorem_verdict(q, "SL3")
    su = theorem_verdict(q, "SU3")
    source, wit, cert = "none", None, None
    if sl.arithmetic:
        source = "SL3"
        alpha = primitive_cube_roots(q, "SL3")[0]
        wit = canonical_reps_sl3(q, alpha)[1]
        cert = is_isolated(wit, "SL3", **kw)
    elif su.arithmetic:
        source = "SU3"
        alpha = primitive_cube_roots(q, "SU3")[0]
        wit = canonical_reps_su3(q, alpha)[0]
        cert = is_isolated(wit, "SU3", **kw)
    count = None
    if census:
        group = "SL3" if q % 3 == 1 else "SU3"
        count = enumerate_isolated(q, group, **kw).class_count_isolated
    return ChiralityVerdict(q, sl.arithmetic, su.arithmetic, sl.roots_of_unity, su.roots_of_unity,
                            source, wit, cert, count)


# -- split octonions --------------------------------------------------------------------

def _vec(F, v):
    if len(v) != 3:
        raise DimensionMismatch("vector parts have length 3")
    return tuple(x.idx if isinstance(x, FieldElem) else F(x).idx for x in v)


class ZornElement:
    """[[a, u], [v, b]] with scalars a, b and vectors u, v in F^3."""

    __slots__ = ("spec", "a", "b", "u", "v")

    def __init__(self, spec: FieldSpec, a, b, u=(0, 0, 0), v=(0, 0, 0)):
        self.spec = spec
        self.a = a.idx if isinstance(a, FieldElem) else spec(a).idx
        self.b = b.idx if isinstance(b, FieldElem) else spec(b).idx
        self.u = _vec(spec, u)
        self.v = _vec(spec, v)

    @classmethod
    def _raw(cls, spec, a, b, u, v):
        obj = cls.__new__(cls)
        obj.spec, obj.a, obj.b, obj.u, obj.v = spec, a, b, tuple(u), tuple(v)
        return obj

    @classmethod
    def one(cls, spec):
        return cls._raw(spec, 1, 1, (0, 0, 0), (0, 0, 0))

    @classmethod
    def basis(cls, spec):
        """The eight coordinate vectors in the order a, b, u1..u3, v1..v3."""
        out = [cls._raw(spec, 1, 0, (0,) * 3, (0,) * 3), cls._raw(spec, 0, 1, (0,) * 3, (0,) * 3)]
        for i in range(3):
            e = tuple(1 if j == i else 0 for j in range(3))
            out.append(cls._raw(spec, 0, 0, e, (0,) * 3))
        for i in range(3):
            e = tuple(1 if j == i else 0 for j in range(3))
            out.append(cls._raw(spec, 0, 0, (0,) * 3, e))
        return out

    @classmethod
    def random(cls, spec, rng: random.Random):
        r = lambda: rng.randrange(spec.order)  # noqa: E731
        return cls._raw(spec, r(), r(), (r(), r(), r()), (r(), r(), r()))

    def norm(self) -> FieldElem:
        F = self.spec
        return FieldElem(F, F.sub(F.mul(self.a, self.b), _dot(F, self.u, self.v)))

    def __mul__(self, other):
        return zorn_multiply(self, other)

    def __add__(self, other):
        F = self.spec
        return ZornElement._raw(F, F.add(self.a, other.a), F.add(self.b, other.b),
                                [F.add(x, y) for x, y in zip(self.u, other.u)],
                                [F.add(x, y) for x, y in zip(self.v, other.v)])

    def is_zero(self):
        return not (self.a or self.b or any(self.u) or any(self.v))

    def __eq__(self, other):
        return (isinstance(other, ZornElement) and self.spec is other.spec
                and (self.a, self.b, self.u, self.v) == (other.a, other.b, other.u, other.v))

    def __hash__(self):
        return hash((self.a, self.b, self.u, self.v))

    def __str__(self):
        f = self.spec.format
        return f"{f(self.a)}|{f(self.b)}|{','.join(map(f, self.u))}|{','.join(map(f, self.v))}"

    __repr__ = __str__


def parse_zorn(text: str, spec: FieldSpec) -> ZornElement:
    parts = text.strip().split("|")
    if len(parts) != 4:
        raise ParseError("expected a|b|u1,u2,u3|v1,v2,v3", 0)
    try:
        a, b = spec.parse(parts[0]), spec.parse(parts[1])
        u = [spec.parse(s) for s in parts[2].split(",")]
        v = [spec.parse(s) for s in parts[3].split(",")]
    except ValueError as exc:
        raise ParseError(str(exc), 0) from exc
    return ZornElement(spec, a, b, u, v)


def _dot(F, u, v):
    acc = 0
    for x, y in zip(u, v):
        if x and y:
            acc = F.add(acc, F.mul(x, y))
    return acc


def _cross(F, u, v):
    m, s = F.mul, F.sub
    return (s(m(u[1], v[2]), m(u[2], v[1])), s(m(u[2], v[0]), m(u[0], v[2])), s(m(u[0], v[1]), m(u[1], v[0])))


def zorn_multiply(x: ZornElement, y: ZornElement) -> ZornElement:
    """[[a, u], [v, b]] [[a', u'], [v', b']] =
    [[aa' + u.v', a u' + b' u - v x v'], [a' v + b v' + u x u', bb' + v.u']]."""
    if x.spec is not y.spec:
        raise DimensionMismatch("Zorn elements over different fields")
    F = x.spec
    add, mul, sub = F.add, F.mul, F.sub
    a = add(mul(x.a, y.a), _dot(F, x.u, y.v))
    b = add(mul(x.b, y.b), _dot(F, x.v, y.u))
    vxv = _cross(F, x.v, y.v)
    uxu = _cross(F, x.u, y.u)
    u = [sub(add(mul(x.a, y.u[i]), mul(y.b, x.u[i])), vxv[i]) for i in range(3)]
    v = [add(add(mul(y.a, x.v[i]), mul(x.b, y.v[i])), uxu[i]) for i in range(3)]
    return ZornElement._raw(F, a, b, u, v)


class SL3Automorphism:
    """phi_A: (a, b, u, v) -> (a, b, A u, A^{-T} v)."""

    def __init__(self, A: SquareMatrix):
        if A.n != 3 or not group_membership(A, "SL"):
            raise NotInAmbientGroup("phi_A needs A in SL_3")
        self.A = A
        self.Ainv_t = A.inverse().T

    def __call__(self, x: ZornElement) -> ZornElement:
        if x.spec is not self.A.spec:
            raise DimensionMismatch("Zorn element and matrix over different fields")
        return ZornElement._raw(x.spec, x.a, x.b, self.A.apply(x.u), self.Ainv_t.apply(x.v))

    def compose(self, other: "SL3Automorphism") -> "SL3Automorphism":
        return SL3Automorphism(self.A @ other.A)


def sl3_automorphism(A: SquareMatrix) -> SL3Automorphism:
    return SL3Automorphism(A)


def is_multiplicative_on_basis(phi, spec) -> bool:
    B = ZornElement.basis(spec)
    return all(phi(x * y) == phi(x) * phi(y) for x in B for y in B)
