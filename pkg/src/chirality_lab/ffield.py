"""Exact arithmetic in F_p, F_{p^n} and the quadratic extension F_{q^2}.

Elements are stored by their integer index ``sum(c_i * p**i)`` where
``c_0, ..., c_{n-1}`` are the coordinates in the power basis of the canonical
modulus.  The canonical order on elements (used for every "least" choice in
the package) is the order of these indices, i.e. coefficient vectors compared
from the top coefficient down.  The canonical modulus is the least monic
irreducible polynomial of degree n in the same order.

Multiplication goes through exp/log tables of a fixed primitive element,
addition in extension fields through a Zech logarithm table, so every field
operation is O(1) after construction.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import NonPrimeCharacteristic, ParseError, SizeCapExceeded, WrongTower, ZeroElement

DEFAULT_SIZE_CAP = 1 << 16


# -- small integer number theory ---------------------------------------------

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of n, ascending."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, n) with q = p**n, or None if q is not a prime power."""
    if q < 2:
        return None
    p = prime_factors(q)[0]
    n = 0
    while q % p == 0:
        q //= p
        n += 1
    return (p, n) if q == 1 else None


# -- polynomials over F_p as coefficient lists (constant term first) ---------

def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, m, p):
    a = list(a)
    inv_lead = pow(m[-1], p - 2, p)
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] * inv_lead % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return _ptrim(a[:dm] if len(a) > dm else a)


def _pmulmod(a, b, m, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pmod(out, m, p)


def _ppowmod(a, e, m, p):
    result = [1]
    base = _pmod(a, m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _psub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _ptrim([(x - y) % p for x, y in zip(a, b)])


def is_irreducible_mod_p(poly, p: int) -> bool:
    """Rabin-style test: monic f of degree n is irreducible iff it shares no
    factor with t^(p^i) - t for i <= n/2 (and n >= 1)."""
    f = _ptrim(list(poly))
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    t = [0, 1]
    power = t
    for _ in range(1, n // 2 + 1):
        power = _ppowmod(power, p, f, p)
        if len(_pgcd(f, _psub(power, t, p), p)) > 1:
            return False
    return True


def canonical_modulus(p: int, n: int) -> tuple[int, ...]:
    """Least monic irreducible polynomial of degree n over F_p (constant term first)."""
    if n == 1:
        return (0, 1)
    for code in range(p ** n):
        low = [(code // p ** i) % p for i in range(n)]
        if low[0] == 0:
            continue
        if is_irreducible_mod_p(low + [1], p):
            return tuple(low + [1])
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# -- fields ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FieldSpec:
    p: int
    n: int
    modulus: tuple
    order: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "order", self.p ** self.n)
        self._build_tables()

    def _build_tables(self):
        p, n, Q = self.p, self.n, self.p ** self.n
        m = list(self.modulus)
        powers = [p ** i for i in range(n)]

        def to_idx(c):
            return sum(ci * pw for ci, pw in zip(c, powers))

        def to_coeffs(i):
            return [(i // pw) % p for pw in powers]

        # least primitive element in canonical order
        fac = prime_factors(Q - 1) if Q > 2 else []
        gen = None
        for cand in range(1, Q):
            c = _ptrim(to_coeffs(cand))
            if all(_ppowmod(c, (Q - 1) // r, m, p) != [1] for r in fac):
                gen = cand
                break
        exp = [0] * (Q - 1) if Q > 1 else []
        log = [-1] * Q
        cur = [1]
        g = _ptrim(to_coeffs(gen))
        for k in range(Q - 1):
            i = to_idx(cur)
            exp[k] = i
            log[i] = k
            cur = _pmulmod(cur, g, m, p)
        zech = None
        if n > 1:
            zech = [0] * (Q - 1)
            for k in range(Q - 1):
                x = exp[k]
                c0 = x % p
                y = x - c0 + (c0 + 1) % p
                zech[k] = log[y]
        object.__setattr__(self, "_exp", exp)
        object.__setattr__(self, "_log", log)
        object.__setattr__(self, "_zech", zech)
        object.__setattr__(self, "_gen", gen)
        object.__setattr__(self, "_half", (Q - 1) // 2 if p != 2 else 0)

    # raw index arithmetic (hot paths use these directly) --------------------

    def add(self, a: int, b: int) -> int:
        if self.n == 1:
            return (a + b) % self.p
        if a == 0:
            return b
        if b == 0:
            return a
        la = self._log[a]
        z = self._zech[(self._log[b] - la) % (self.order - 1)]
        if z < 0:
            return 0
        return self._exp[(la + z) % (self.order - 1)]

    def neg(self, a: int) -> int:
        if self.n == 1:
            return (-a) % self.p
        if a == 0:
            return 0
        return self._exp[(self._log[a] + self._half) % (self.order - 1)]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.n == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroElement("zero has no inverse")
        return self._exp[(-self._log[a]) % (self.order - 1)]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroElement("zero has no inverse")
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    def log(self, a: int) -> int:
        """Discrete log to the base of ``primitive_element``."""
        if a == 0:
            raise ZeroElement("log of zero")
        return self._log[a]

    def exp(self, k: int) -> int:
        return self._exp[k % (self.order - 1)]

    def mult_order(self, a: int) -> int:
        return (self.order - 1) // math.gcd(self.log(a), self.order - 1)

    # element construction -------------------------------------------------

    def __call__(self, value) -> "FieldElem":
        if isinstance(value, FieldElem):
            if value.spec is not self:
                raise WrongTower("element belongs to a different field")
            return value
        if isinstance(value, int):
            return FieldElem(self, value % self.p)
        if isinstance(value, str):
            return self.parse(value)
        return self.from_coeffs(value)

    def from_coeffs(self, coeffs) -> "FieldElem":
        coeffs = list(coeffs)
        if len(coeffs) > self.n:
            coeffs = _pmod([c % self.p for c in coeffs], list(self.modulus), self.p)
        idx = sum((c % self.p) * self.p ** i for i, c in enumerate(coeffs))
        return FieldElem(self, idx)

    def elem(self, idx: int) -> "FieldElem":
        if not 0 <= idx < self.order:
            raise ValueError(f"index {idx} out of range for F_{self.order}")
        return FieldElem(self, idx)

    @property
    def zero(self) -> "FieldElem":
        return FieldElem(self, 0)

    @property
    def one(self) -> "FieldElem":
        return FieldElem(self, 1)

    @property
    def primitive_element(self) -> "FieldElem":
        return FieldElem(self, self._gen)

    def elements(self):
        """All elements in canonical order."""
        return [FieldElem(self, i) for i in range(self.order)]

    def units(self):
        return [FieldElem(self, i) for i in range(1, self.order)]

    def random(self, rng: random.Random, nonzero=False) -> "FieldElem":
        lo = 1 if nonzero else 0
        return FieldElem(self, rng.randrange(lo, self.order))

    # quadratic structure ----------------------------------------------------

    @property
    def has_quadratic_subfield(self) -> bool:
        return self.n % 2 == 0

    @property
    def base_order(self) -> int:
        """q for this field viewed as F_{q^2}."""
        if self.n % 2:
            raise WrongTower(f"F_{self.order} is not a quadratic extension")
        return self.p ** (self.n // 2)

    def bar_index(self, a: int) -> int:
        return self.pow(a, self.base_order)

    # text form ----------------------------------------------------------------

    def format(self, a: int) -> str:
        if self.n == 1:
            return str(a)
        terms = []
        for i in range(self.n):
            c = (a // self.p ** i) % self.p
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                mono = "t" if i == 1 else f"t^{i}"
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return "+".join(terms) if terms else "0"

    _TERM = re.compile(r"\s*([+-]?)\s*(\d*)\s*(\*?\s*t\s*(?:\^\s*(\d+))?)?\s*")

    def parse(self, text: str) -> "FieldElem":
        s = text.strip()
        if not s:
            raise ParseError("empty field element", 0)
        if self.n == 1:
            try:
                return FieldElem(self, int(s) % self.p)
            except ValueError:
                raise ParseError(f"not an element of F_{self.p}: {text!r}", 0) from None
        coeffs = [0] * self.n
        pos = 0
        first = True
        while pos < len(s):
            mt = self._TERM.match(s, pos)
            sign, digits, tpart, expo = mt.group(1), mt.group(2), mt.group(3), mt.group(4)
            if mt.end() == pos or (not digits and not tpart) or (not first and not sign):
                raise ParseError(f"bad term in field element {text!r}", pos)
            c = int(digits) if digits else 1
            if sign == "-":
                c = -c
            k = 0 if not tpart else (int(expo) if expo is not None else 1)
            if tpart and tpart.lstrip().startswith("*") and not digits:
                raise ParseError(f"dangling '*' in {text!r}", pos)
            if k >= self.n:
                raise ParseError(f"power t^{k} not reduced for degree {self.n}", pos)
            coeffs[k] += c
            pos = mt.end()
            first = False
        return self.from_coeffs(coeffs)

    def modulus_str(self) -> str:
        parts = []
        for i in range(self.n, -1, -1):
            c = self.modulus[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if i == 0:
                parts.append(str(c))
            else:
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return "+".join(parts)

    def __repr__(self):
        if self.n == 1:
            return f"FieldSpec(F_{self.p})"
        return f"FieldSpec(F_{self.order}, modulus={self.modulus_str()})"


@lru_cache(maxsize=None)
def _make_field_cached(p: int, n: int) -> FieldSpec:
    return FieldSpec(p, n, canonical_modulus(p, n))


def make_field(p: int, n: int = 1, size_cap: int = DEFAULT_SIZE_CAP) -> FieldSpec:
    """The field F_{p^n} with its canonical modulus.  Equal (p, n) give the
    identical object."""
    if not is_prime(p):
        raise NonPrimeCharacteristic(f"{p} is not prime")
    if n < 1:
        raise ValueError("extension degree must be >= 1")
    if p ** n > size_cap:
        raise SizeCapExceeded(f"p^n = {p ** n} exceeds size cap {size_cap}")
    return _make_field_cached(p, n)


def field_of_order(q: int, size_cap: int = DEFAULT_SIZE_CAP) -> FieldSpec:
    pp = prime_power(q)
    if pp is None:
        raise NonPrimeCharacteristic(f"{q} is not a prime power")
    return make_field(pp[0], pp[1], size_cap)


def quadratic_extension(q: int, size_cap: int = DEFAULT_SIZE_CAP) -> FieldSpec:
    """F_{q^2}, realised as F_{p^{2n}}."""
    pp = prime_power(q)
    if pp is None:
        raise NonPrimeCharacteristic(f"{q} is not a prime power")
    return make_field(pp[0], 2 * pp[1], size_cap)


class FieldElem:
    __slots__ = ("spec", "idx")

    def __init__(self, spec: FieldSpec, idx: int):
        self.spec = spec
        self.idx = idx

    @property
    def coeffs(self) -> tuple:
        p = self.spec.p
        return tuple((self.idx // p ** i) % p for i in range(self.spec.n))

    def _other(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.spec is not self.spec:
                raise WrongTower("mixed fields in arithmetic")
            return other.idx
        if isinstance(other, int):
            return other % self.spec.p
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.spec, self.spec.add(self.idx, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.spec, self.spec.sub(self.idx, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.spec, self.spec.sub(o, self.idx))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.spec, self.spec.mul(self.idx, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.spec, self.spec.mul(self.idx, self.spec.inv(o)))

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.spec, self.spec.mul(o, self.spec.inv(self.idx)))

    def __neg__(self):
        return FieldElem(self.spec, self.spec.neg(self.idx))

    def __pow__(self, e: int):
        return FieldElem(self.spec, self.spec.pow(self.idx, e))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.spec, self.spec.inv(self.idx))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.spec is other.spec and self.idx == other.idx
        if isinstance(other, int):
            return self.idx == other % self.spec.p
        return NotImplemented

    def __hash__(self):
        return hash((id(self.spec), self.idx))

    def __lt__(self, other):
        return self.idx < other.idx

    def __bool__(self):
        return self.idx != 0

    def is_zero(self) -> bool:
        return self.idx == 0

    def order(self) -> int:
        """Multiplicative order."""
        return self.spec.mult_order(self.idx)

    def __str__(self):
        return self.spec.format(self.idx)

    def __repr__(self):
        return f"<{self.spec.format(self.idx)} in F_{self.spec.order}>"


# -- quadratic-extension structure -------------------------------------------

def frobenius_bar(x: FieldElem, q: int | None = None) -> FieldElem:
    """x -> x^q for x in F_{q^2}.  ``q`` defaults to the unique index-2 subfield."""
    spec = x.spec
    if q is not None and spec.order != q * q:
        raise WrongTower(f"F_{spec.order} is not a quadratic extension of F_{q}")
    return FieldElem(spec, spec.bar_index(x.idx))


def norm(x: FieldElem, q: int | None = None) -> FieldElem:
    return x * frobenius_bar(x, q)


@dataclass(frozen=True)
class NormOneGroup:
    base_q: int
    field: FieldSpec
    elements: tuple
    generator: FieldElem

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return isinstance(x, FieldElem) and x.spec is self.field and x * frobenius_bar(x) == 1

    def index_of(self, x: FieldElem) -> int:
        """Discrete log of x to the base ``generator`` (mod q+1)."""
        lg = self.field.log(self.generator.idx)
        lx = self.field.log(x.idx)
        m = self.field.order - 1
        # generator = g^lg with gcd(lg, m) = q-1; solve k*lg = lx mod m
        d = self.base_q - 1
        if lx % d:
            raise ValueError("element not of norm 1")
        return (lx // d) * pow(lg // d, -1, self.base_q + 1) % (self.base_q + 1)


@lru_cache(maxsize=None)
def norm_one_subgroup(q: int, size_cap: int = DEFAULT_SIZE_CAP) -> NormOneGroup:
    """All x in F_{q^2} with x * bar(x) = 1, by exhaustive filtering."""
    F = quadratic_extension(q, size_cap)
    els = tuple(x for x in F.units() if x * frobenius_bar(x, q) == F.one)
    gen = next(x for x in els if x.order() == q + 1)
    return NormOneGroup(q, F, els, gen)


def _ambient_members(ambient):
    if isinstance(ambient, NormOneGroup):
        return ambient.elements, ambient.order, ambient.field
    return ambient.units(), ambient.order - 1, ambient


def primitive_root_of_unity(ambient, m: int) -> FieldElem | None:
    """Canonically least element of exact multiplicative order m in F^* or in
    the norm-one group, or None when there is none."""
    if m < 1:
        raise ValueError("m must be positive")
    members, group_order, _ = _ambient_members(ambient)
    if group_order % m:
        return None
    for x in members:
        if x.order() == m:
            return x
    return None  # pragma: no cover - unreachable for cyclic groups


@lru_cache(maxsize=None)
def _cubes(ambient) -> frozenset:
    members, _, _ = _ambient_members(ambient)
    return frozenset((x * x * x).idx for x in members)


def cube_root_solvable(g: FieldElem, ambient) -> bool:
    """True iff x^3 = g for some x in the ambient multiplicative group."""
    if g.is_zero():
        raise ZeroElement("cube roots are only considered for units")
    _, _, F = _ambient_members(ambient)
    if g.spec is not F:
        raise WrongTower("element and ambient group live in different fields")
    return g.idx in _cubes(ambient)
