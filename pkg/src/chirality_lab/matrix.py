"""Small dense matrices over a FieldSpec.

Entries are kept as field indices; ``entries`` gives FieldElem views.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import DimensionMismatch, ParseError, SingularMatrix, WrongTower
from .ffield import FieldElem, FieldSpec
from .poly import Poly, smith_form

MAX_DIM = 4

GROUP_KINDS = ("GL", "SL", "U", "SU")


class SquareMatrix:
    __slots__ = ("spec", "n", "rows", "_hash")

    def __init__(self, spec: FieldSpec, rows):
        rows = tuple(tuple(x.idx if isinstance(x, FieldElem) else spec(x).idx for x in r) for r in rows)
        n = len(rows)
        if not 1 <= n <= MAX_DIM or any(len(r) != n for r in rows):
            raise DimensionMismatch(f"need a square matrix of size <= {MAX_DIM}")
        self.spec = spec
        self.n = n
        self.rows = rows
        self._hash = None

    @classmethod
    def _raw(cls, spec, rows):
        obj = cls.__new__(cls)
        obj.spec = spec
        obj.n = len(rows)
        obj.rows = tuple(tuple(r) for r in rows)
        obj._hash = None
        return obj

    @classmethod
    def identity(cls, spec, n=3):
        return cls._raw(spec, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, spec, n=3):
        return cls._raw(spec, [[0] * n for _ in range(n)])

    @classmethod
    def diag(cls, spec, values):
        vals = [v.idx if isinstance(v, FieldElem) else spec(v).idx for v in values]
        n = len(vals)
        return cls._raw(spec, [[vals[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def antidiag(cls, spec, values):
        """values[i] sits at row i, column n-1-i."""
        vals = [v.idx if isinstance(v, FieldElem) else spec(v).idx for v in values]
        n = len(vals)
        return cls._raw(spec, [[vals[i] if j == n - 1 - i else 0 for j in range(n)] for i in range(n)])

    @property
    def entries(self):
        F = self.spec
        return [[FieldElem(F, x) for x in r] for r in self.rows]

    def __getitem__(self, ij) -> FieldElem:
        i, j = ij
        return FieldElem(self.spec, self.rows[i][j])

    def _same(self, other):
        if not isinstance(other, SquareMatrix):
            raise TypeError("expected a SquareMatrix")
        if other.spec is not self.spec:
            raise WrongTower("matrices over different fields")
        if other.n != self.n:
            raise DimensionMismatch(f"{self.n}x{self.n} vs {other.n}x{other.n}")

    def __matmul__(self, other):
        self._same(other)
        F, n = self.spec, self.n
        a, b = self.rows, other.rows
        add, mul = F.add, F.mul
        out = []
        for i in range(n):
            ai = a[i]
            row = []
            for j in range(n):
                acc = 0
                for k in range(n):
                    x = ai[k]
                    if x:
                        y = b[k][j]
                        if y:
                            acc = add(acc, mul(x, y))
                row.append(acc)
            out.append(row)
        return SquareMatrix._raw(F, out)

    __mul__ = __matmul__

    def __add__(self, other):
        self._same(other)
        F = self.spec
        return SquareMatrix._raw(F, [[F.add(x, y) for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._same(other)
        F = self.spec
        return SquareMatrix._raw(F, [[F.sub(x, y) for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        F = self.spec
        return SquareMatrix._raw(F, [[F.neg(x) for x in r] for r in self.rows])

    def scale(self, c) -> "SquareMatrix":
        F = self.spec
        c = c.idx if isinstance(c, FieldElem) else F(c).idx
        return SquareMatrix._raw(F, [[F.mul(c, x) for x in r] for r in self.rows])

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = SquareMatrix.identity(self.spec, self.n)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    @property
    def T(self) -> "SquareMatrix":
        return SquareMatrix._raw(self.spec, list(zip(*self.rows)))

    def transpose(self) -> "SquareMatrix":
        return self.T

    def det(self) -> FieldElem:
        F, n = self.spec, self.n
        m = [list(r) for r in self.rows]
        d = 1
        for c in range(n):
            piv = next((r for r in range(c, n) if m[r][c]), None)
            if piv is None:
                return F.zero
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                d = F.neg(d)
            d = F.mul(d, m[c][c])
            inv = F.inv(m[c][c])
            for r in range(c + 1, n):
                if m[r][c]:
                    f = F.mul(m[r][c], inv)
                    m[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(m[r], m[c])]
        return FieldElem(F, d)

    def inverse(self) -> "SquareMatrix":
        F, n = self.spec, self.n
        m = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(self.rows)]
        for c in range(n):
            piv = next((r for r in range(c, n) if m[r][c]), None)
            if piv is None:
                raise SingularMatrix("matrix has determinant 0")
            m[c], m[piv] = m[piv], m[c]
            inv = F.inv(m[c][c])
            m[c] = [F.mul(inv, x) for x in m[c]]
            for r in range(n):
                if r != c and m[r][c]:
                    f = m[r][c]
                    m[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(m[r], m[c])]
        return SquareMatrix._raw(F, [r[n:] for r in m])

    def bar(self) -> "SquareMatrix":
        """Entrywise x -> x^q, q the index-2 subfield order."""
        F = self.spec
        q = F.base_order
        return SquareMatrix._raw(F, [[F.pow(x, q) if x else 0 for x in r] for r in self.rows])

    entrywise_bar = bar

    def is_identity(self) -> bool:
        return all(x == (1 if i == j else 0) for i, r in enumerate(self.rows) for j, x in enumerate(r))

    def is_scalar(self) -> bool:
        a = self.rows[0][0]
        return all(x == (a if i == j else 0) for i, r in enumerate(self.rows) for j, x in enumerate(r))

    def trace(self) -> FieldElem:
        F = self.spec
        acc = 0
        for i in range(self.n):
            acc = F.add(acc, self.rows[i][i])
        return FieldElem(F, acc)

    def __eq__(self, other):
        return isinstance(other, SquareMatrix) and self.spec is other.spec and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((id(self.spec), self.rows))
        return self._hash

    def sort_key(self):
        """Canonical order: row-major entries compared in canonical field order."""
        return tuple(x for r in self.rows for x in r)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return format_matrix(self)

    def __repr__(self):
        return f"SquareMatrix(F_{self.spec.order}, '{format_matrix(self)}')"

    def apply(self, vec):
        """Matrix times a column vector of field indices."""
        F = self.spec
        out = []
        for r in self.rows:
            acc = 0
            for x, y in zip(r, vec):
                if x and y:
                    acc = F.add(acc, F.mul(x, y))
            out.append(acc)
        return out

    def flat(self):
        return [x for r in self.rows for x in r]


def format_matrix(A: SquareMatrix) -> str:
    F = A.spec
    return ";".join(",".join(F.format(x) for x in r) for r in A.rows)


def parse_matrix(text: str, spec: FieldSpec) -> SquareMatrix:
    rows = []
    offset = 0
    for rtext in text.split(";"):
        row = []
        col_off = offset
        for etext in rtext.split(","):
            try:
                row.append(spec.parse(etext))
            except ParseError as exc:
                raise ParseError(f"bad matrix entry {etext.strip()!r}", col_off + (exc.position or 0)) from None
            col_off += len(etext) + 1
        rows.append(row)
        offset += len(rtext) + 1
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ParseError(f"matrix text is not square: {text!r}", 0)
    try:
        return SquareMatrix(spec, rows)
    except DimensionMismatch as exc:
        raise ParseError(str(exc), 0) from None


def random_matrix(spec, n, rng: random.Random) -> SquareMatrix:
    return SquareMatrix._raw(spec, [[rng.randrange(spec.order) for _ in range(n)] for _ in range(n)])


def random_invertible(spec, n, rng: random.Random) -> SquareMatrix:
    while True:
        A = random_matrix(spec, n, rng)
        if A.det():
            return A


# -- linear algebra on index vectors ------------------------------------------

def rref(rows, F: FieldSpec):
    """Reduced row echelon form of a list of index rows; returns (rows, pivots)."""
    m = [list(r) for r in rows]
    pivots = []
    if not m:
        return m, pivots
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = F.inv(m[r][c])
        m[r] = [F.mul(inv, x) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows, ncols: int, F: FieldSpec):
    """Basis of {x : rows @ x = 0} in canonical echelon form."""
    red, pivots = rref(rows, F) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for r, pc in zip(red, pivots):
            if r[f]:
                v[pc] = F.neg(r[f])
        basis.append(v)
    return basis


def intertwiner_basis(A: SquareMatrix, B: SquareMatrix):
    """Basis of the linear space {X : X A = B X}, as matrices."""
    A._same(B)
    F, n = A.spec, A.n
    # unknown X[i][j] at position i*n + j; equation (XA - BX)[i][j] = 0
    eqs = []
    for i in range(n):
        for j in range(n):
            row = [0] * (n * n)
            for k in range(n):
                # (XA)[i][j] = sum_k X[i][k] A[k][j]
                row[i * n + k] = F.add(row[i * n + k], A.rows[k][j])
                # (BX)[i][j] = sum_k B[i][k] X[k][j]
                row[k * n + j] = F.sub(row[k * n + j], B.rows[i][k])
            eqs.append(row)
    vecs = nullspace(eqs, n * n, F)
    return [SquareMatrix._raw(F, [v[i * n:(i + 1) * n] for i in range(n)]) for v in vecs]


def combine(basis, coeffs, F: FieldSpec, n: int) -> SquareMatrix:
    """sum(c_i * basis_i) with c_i field indices."""
    out = [[0] * n for _ in range(n)]
    for c, Bm in zip(coeffs, basis):
        if not c:
            continue
        for i in range(n):
            bi = Bm.rows[i]
            oi = out[i]
            for j in range(n):
                if bi[j]:
                    oi[j] = F.add(oi[j], F.mul(c, bi[j]))
    return SquareMatrix._raw(F, out)


# -- polynomial invariants ------------------------------------------------------

@dataclass(frozen=True)
class PolyInvariants:
    char_poly: Poly
    min_poly: Poly
    invariant_factors: tuple

    def key(self):
        return tuple(f.c for f in self.invariant_factors)

    def is_regular(self) -> bool:
        return len(self.invariant_factors) == 1


def char_matrix(A: SquareMatrix):
    """X I - A as a matrix of polynomials."""
    F, n = A.spec, A.n
    return [[Poly._raw(F, (F.neg(A.rows[i][j]), 1) if i == j else (F.neg(A.rows[i][j]),)) for j in range(n)]
            for i in range(n)]


def smith_data(A: SquareMatrix):
    return smith_form(char_matrix(A))


def poly_invariants(A: SquareMatrix) -> PolyInvariants:
    diag, _, _, _ = smith_data(A)
    factors = tuple(d for d in diag if d.degree >= 1)
    chi = Poly._raw(A.spec, (1,))
    for f in factors:
        chi = chi * f
    return PolyInvariants(chi, factors[-1], factors)


def eval_poly_at(f: Poly, A: SquareMatrix) -> SquareMatrix:
    F, n = A.spec, A.n
    acc = SquareMatrix.zeros(F, n)
    for c in reversed(f.c):
        acc = acc @ A
        if c:
            acc = SquareMatrix._raw(F, [[F.add(x, c) if i == j else x for j, x in enumerate(r)]
                                        for i, r in enumerate(acc.rows)])
    return acc


def companion(f: Poly) -> list:
    """Companion matrix rows (as index lists) of a monic f: basis v, Av, ..."""
    F = f.spec
    d = f.degree
    m = [[0] * d for _ in range(d)]
    for i in range(1, d):
        m[i][i - 1] = 1
    for i in range(d):
        m[i][d - 1] = F.neg(f.c[i])
    return m


def frobenius_basis(A: SquareMatrix):
    """(P, factors) with P^{-1} A P the block-diagonal companion form of the
    invariant factors.  The cyclic generators come from the columns of U^{-1}
    in the Smith reduction of XI - A."""
    F, n = A.spec, A.n
    diag, _, _, Ui = smith_data(A)
    cols = []
    factors = []
    for i, d in enumerate(diag):
        if d.degree < 1:
            continue
        factors.append(d)
        w = [0] * n
        for j in range(n):
            pj = eval_poly_at(Ui[j][i], A)
            col = [pj.rows[r][j] for r in range(n)]
            w = [F.add(x, y) for x, y in zip(w, col)]
        v = w
        for _ in range(d.degree):
            cols.append(v)
            v = A.apply(v)
    P = SquareMatrix._raw(F, [[cols[j][i] for j in range(n)] for i in range(n)])
    return P, tuple(factors)


# -- group membership -------------------------------------------------------------

def standard_form(spec, n=3) -> SquareMatrix:
    """The hermitian Gram matrix antidiag(1, ..., 1)."""
    return SquareMatrix.antidiag(spec, [1] * n)


def is_unitary(A: SquareMatrix, form: SquareMatrix | None = None) -> bool:
    if not A.spec.has_quadratic_subfield:
        raise WrongTower(f"F_{A.spec.order} carries no bar involution")
    Bf = form if form is not None else standard_form(A.spec, A.n)
    return A.T @ Bf @ A.bar() == Bf


def group_membership(A: SquareMatrix, kind: str, form: SquareMatrix | None = None) -> bool:
    kind = kind.upper()
    if kind == "GL":
        return bool(A.det())
    if kind == "SL":
        return A.det() == 1
    if kind == "U":
        return is_unitary(A, form)
    if kind == "SU":
        return is_unitary(A, form) and A.det() == 1
    raise ValueError(f"unknown group kind {kind!r}")
