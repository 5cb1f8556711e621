"""Univariate polynomials over a FieldSpec and Smith reduction of
polynomial matrices over F[X]."""

from __future__ import annotations

from .errors import WrongTower
from .ffield import FieldElem, FieldSpec


class Poly:
    """Polynomial with coefficients stored as field indices, constant term first."""

    __slots__ = ("spec", "c")

    def __init__(self, spec: FieldSpec, coeffs=()):
        c = [x.idx if isinstance(x, FieldElem) else spec(x).idx for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.spec = spec
        self.c = tuple(c)

    @classmethod
    def _raw(cls, spec, c):
        c = list(c)
        while c and c[-1] == 0:
            c.pop()
        obj = cls.__new__(cls)
        obj.spec = spec
        obj.c = tuple(c)
        return obj

    @classmethod
    def x(cls, spec):
        return cls._raw(spec, (0, 1))

    @classmethod
    def const(cls, spec, a):
        return cls._raw(spec, (a.idx if isinstance(a, FieldElem) else a,))

    @classmethod
    def linear(cls, spec, root):
        """X - root."""
        r = root.idx if isinstance(root, FieldElem) else root
        return cls._raw(spec, (spec.neg(r), 1))

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    @property
    def lc(self) -> int:
        return self.c[-1]

    def coeff(self, i) -> FieldElem:
        return FieldElem(self.spec, self.c[i] if i < len(self.c) else 0)

    def _check(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (int, FieldElem)):
                return Poly(self.spec, [other])
            return NotImplemented
        if other.spec is not self.spec:
            raise WrongTower("polynomials over different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        F = self.spec
        a, b = self.c, other.c
        n = max(len(a), len(b))
        return Poly._raw(F, [F.add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.spec, [self.spec.neg(x) for x in self.c])

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        F = self.spec
        if not self.c or not other.c:
            return Poly._raw(F, ())
        out = [0] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(other.c):
                    if y:
                        out[i + j] = F.add(out[i + j], F.mul(x, y))
        return Poly._raw(F, out)

    __rmul__ = __mul__

    def scale(self, a: int) -> "Poly":
        F = self.spec
        return Poly._raw(F, [F.mul(a, x) for x in self.c])

    def __pow__(self, e: int):
        result = Poly._raw(self.spec, (1,))
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other):
        other = self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        F = self.spec
        r = list(self.c)
        db = other.degree
        inv_lc = F.inv(other.lc)
        if len(r) - 1 < db:
            return Poly._raw(F, ()), self
        qt = [0] * (len(r) - db)
        for i in range(len(r) - 1, db - 1, -1):
            if r[i] == 0:
                continue
            f = F.mul(r[i], inv_lc)
            qt[i - db] = f
            for j, b in enumerate(other.c):
                if b:
                    r[i - db + j] = F.sub(r[i - db + j], F.mul(f, b))
        return Poly._raw(F, qt), Poly._raw(F, r[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if not self.c:
            return self
        return self.scale(self.spec.inv(self.lc))

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def __call__(self, x):
        F = self.spec
        xi = x.idx if isinstance(x, FieldElem) else x
        acc = 0
        for c in reversed(self.c):
            acc = F.add(F.mul(acc, xi), c)
        return FieldElem(F, acc)

    def roots(self):
        return [a for a in self.spec.elements() if self(a).is_zero()]

    def is_irreducible(self) -> bool:
        """Irreducibility by gcd with X^(Q^i) - X, i <= deg/2."""
        d = self.degree
        if d < 1:
            return False
        if d == 1:
            return True
        X = Poly.x(self.spec)
        f = self.monic()
        h = X
        for _ in range(d // 2):
            h = _powmod(h, self.spec.order, f)
            if (h - X).gcd(f).degree > 0:
                return False
        return True

    def __eq__(self, other):
        return isinstance(other, Poly) and self.spec is other.spec and self.c == other.c

    def __hash__(self):
        return hash((id(self.spec), self.c))

    def __str__(self):
        F = self.spec
        if not self.c:
            return "0"
        terms = []
        for i in range(len(self.c) - 1, -1, -1):
            a = self.c[i]
            if a == 0:
                continue
            mono = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            s = F.format(a)
            if F.n > 1 and "+" in s:
                s = f"({s})"
            if i == 0:
                terms.append(s)
            else:
                terms.append(mono if a == 1 else f"{s}*{mono}")
        return "+".join(terms)

    __repr__ = __str__


def _powmod(a: Poly, e: int, m: Poly) -> Poly:
    result = Poly._raw(a.spec, (1,))
    base = a % m
    while e:
        if e & 1:
            result = (result * base) % m
        base = (base * base) % m
        e >>= 1
    return result


def smith_form(M):
    """Diagonalise a square matrix over F[X] by elementary row/column moves.

    Returns (diag, U, V, Uinv) with U @ M @ V = diag(diag) and each diagonal
    entry monic (or zero) dividing the next.  U and V are unimodular.
    """
    n = len(M)
    F = M[0][0].spec
    one = Poly._raw(F, (1,))
    zero = Poly._raw(F, ())
    A = [list(row) for row in M]
    U = [[one if i == j else zero for j in range(n)] for i in range(n)]
    V = [[one if i == j else zero for j in range(n)] for i in range(n)]
    Ui = [[one if i == j else zero for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for row in Ui:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for mat in (A, V):
            for row in mat:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):
        # row_dst += f * row_src
        A[dst] = [a + f * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]
        for row in Ui:
            row[src] = row[src] - f * row[dst]

    def add_col(dst, src, f):
        for mat in (A, V):
            for row in mat:
                row[dst] = row[dst] + f * row[src]

    for t in range(n):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    if not A[i][j].is_zero() and (best is None or A[i][j].degree < A[best[0]][best[1]].degree):
                        best = (i, j)
            if best is None:
                break
            if best[0] != t:
                swap_rows(t, best[0])
            if best[1] != t:
                swap_cols(t, best[1])
            dirty = False
            for i in range(t + 1, n):
                if not A[i][t].is_zero():
                    qt, r = divmod(A[i][t], A[t][t])
                    add_row(i, t, -qt)
                    dirty = dirty or not r.is_zero()
            for j in range(t + 1, n):
                if not A[t][j].is_zero():
                    qt, r = divmod(A[t][j], A[t][t])
                    add_col(j, t, -qt)
                    dirty = dirty or not r.is_zero()
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, n)
                        if not (A[i][j] % A[t][t]).is_zero()), None)
            if bad is None:
                break
            add_row(t, bad[0], one)
        if not A[t][t].is_zero():
            lc = A[t][t].lc
            if lc != 1:
                inv = F.inv(lc)
                A[t] = [a.scale(inv) for a in A[t]]
                U[t] = [a.scale(inv) for a in U[t]]
                for row in Ui:
                    row[t] = row[t].scale(lc)
    return [A[i][i] for i in range(n)], U, V, Ui
