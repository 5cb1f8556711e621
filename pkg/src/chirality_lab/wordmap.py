"""Word maps on small finite groups.

Words are freely reduced sequences of (letter, exponent).  Groups are given
by multiplication tables over element indices, so an image w(G) is computed
by vectorised table lookups over all of G^d.  Inversion certificates realise
per element the automorphism psi with psi(g) = g^-1 that makes the classical
groups achiral.
"""

from __future__ import annotations

import itertools
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .conjugacy import gl_conjugator, unitary_conjugator
from .errors import ArityExceeded, ArityMismatch, CertificateNotFound, NotInAmbientGroup, ParseError, \
    SizeCapExceeded
from .ffield import field_of_order
from .groups import encode, enumerate_group, vec_field
from .matrix import SquareMatrix, group_membership

MAX_ARITY = 9
DEFAULT_IMAGE_CAP = 10 ** 7
LETTER_NAMES = "xyz"


# -- words ------------------------------------------------------------------------------

def _reduce(segs):
    out = []
    for letter, e in segs:
        if e == 0:
            continue
        if out and out[-1][0] == letter:
            e2 = out[-1][1] + e
            out.pop()
            if e2:
                out.append((letter, e2))
        else:
            out.append((letter, e))
    return out


@dataclass(frozen=True)
class Word:
    letters: tuple          # ((letter index >= 1, nonzero exponent), ...), freely reduced
    arity: int

    @classmethod
    def make(cls, segs, arity=None):
        segs = tuple(_reduce(list(segs)))
        top = max((l for l, _ in segs), default=0)
        return cls(segs, max(top, arity or 0))

    @property
    def length(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def inverse(self) -> "Word":
        return Word(tuple((l, -e) for l, e in reversed(self.letters)), self.arity)

    def __mul__(self, other: "Word") -> "Word":
        return Word.make(self.letters + other.letters, max(self.arity, other.arity))

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word.make(base.letters * abs(k), self.arity)

    def flat(self):
        """Letter sequence with signs, e.g. x^2 y^-1 -> [1, 1, -2]."""
        return [l if e > 0 else -l for l, e in self.letters for _ in range(abs(e))]

    def __str__(self):
        if not self.letters:
            return "1"
        names = _letter_names(self.arity)
        return "*".join(names[l - 1] + ("" if e == 1 else f"^{e}") for l, e in self.letters)

    __repr__ = __str__


def _letter_names(arity):
    return list(LETTER_NAMES) if arity <= 3 else [f"g{i}" for i in range(1, MAX_ARITY + 1)]


_TOKEN = re.compile(r"\s*(?:(?P<g>g[1-9])|(?P<l>[xyz])|(?P<int>[+-]?\d+)|(?P<op>[()\[\],*^])|(?P<bad>\S))")


class _Parser:
    def __init__(self, text, max_arity):
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:  # trailing whitespace
                break
            kind = m.lastgroup
            start = m.start(kind)
            if kind == "bad":
                raise ParseError(f"unexpected character {m.group(kind)!r}", start)
            self.toks.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0
        self.end = len(text)
        self.max_arity = max_arity

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, self.end)

    def take(self, value=None):
        tok = self.peek()
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r}", tok[2])
        self.i += 1
        return tok

    def word(self):
        segs = self.term()
        while True:
            kind, val, _ = self.peek()
            if val == "*":
                self.take()
                segs = segs + self.term()
            elif kind in ("g", "l") or val in ("(", "["):
                segs = segs + self.term()
            else:
                return segs

    def term(self):
        segs = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "int":
                raise ParseError("expected an integer exponent", pos)
            k = int(val)
            if k == 0:
                raise ParseError("exponent must be nonzero", pos)
            base = segs if k > 0 else [(l, -e) for l, e in reversed(segs)]
            segs = base * abs(k)
        return segs

    def atom(self):
        kind, val, pos = self.take()
        if kind == "l":
            return [(LETTER_NAMES.index(val) + 1, 1)]
        if kind == "g":
            idx = int(val[1:])
            if idx > self.max_arity:
                raise ArityExceeded(f"letter {val} exceeds arity {self.max_arity}")
            return [(idx, 1)]
        if val == "(":
            segs = self.word()
            self.take(")")
            return segs
        if val == "[":
            a = self.word()
            self.take(",")
            b = self.word()
            self.take("]")
            inv = lambda s: [(l, -e) for l, e in reversed(s)]  # noqa: E731
            return a + b + inv(a) + inv(b)
        if kind == "int" and val == "1":
            return []
        raise ParseError("expected a letter, '(' or '['", pos)


def parse_word(text: str, max_arity: int = MAX_ARITY) -> Word:
    """Parse the word grammar; '1' stands for the empty word."""
    p = _Parser(text, max_arity)
    if not p.toks:
        raise ParseError("empty word", 0)
    segs = p.word()
    if p.i != len(p.toks):
        raise ParseError("trailing input", p.peek()[2])
    w = Word.make(segs)
    if w.arity > max_arity:
        raise ArityExceeded(f"word uses {w.arity} letters, limit {max_arity}")
    return w


# -- groups as tables -------------------------------------------------------------------

@dataclass(eq=False)
class GroupTable:
    name: str
    kind: str                       # symmetric | alternating | cyclic | SL | SU | custom
    labels: list
    mul: np.ndarray                 # mul[a, b] = index of a*b
    inv: np.ndarray
    identity: int
    matrices: list | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.labels)

    @property
    def order(self):
        return len(self.labels)

    def conj(self, x: int, a):
        """x a x^-1, vectorised over a."""
        return self.mul[self.mul[x, a], self.inv[x]]

    @property
    def class_labels(self) -> np.ndarray:
        return _class_labels(self)

    def index_of_matrix(self, M: SquareMatrix) -> int:
        return self._matrix_index[M]

    @property
    def _matrix_index(self):
        if not hasattr(self, "_mi"):
            self._mi = {M: i for i, M in enumerate(self.matrices)}
        return self._mi

    @classmethod
    def from_table(cls, mul, labels=None, name="custom", spot_checks: int = 2000, seed: int = 0):
        """Custom group from a multiplication table; group axioms are checked
        exhaustively for small tables and by random spot checks otherwise."""
        mul = np.asarray(mul, dtype=np.int64)
        N = len(mul)
        if mul.shape != (N, N) or mul.min() < 0 or mul.max() >= N:
            raise ValueError("not a valid multiplication table")
        ident = [e for e in range(N) if (mul[e] == np.arange(N)).all() and (mul[:, e] == np.arange(N)).all()]
        if not ident:
            raise ValueError("no identity element")
        e = ident[0]
        inv = np.full(N, -1, dtype=np.int64)
        for a in range(N):
            hit = np.nonzero(mul[a] == e)[0]
            if len(hit) != 1 or mul[hit[0], a] != e:
                raise ValueError(f"element {a} has no two-sided inverse")
            inv[a] = hit[0]
        if N ** 3 <= 10 ** 6:
            a = np.arange(N)
            lhs = mul[mul[a[:, None, None], a[None, :, None]], a[None, None, :]]
            rhs = mul[a[:, None, None], mul[a[None, :, None], a[None, None, :]]]
            if not (lhs == rhs).all():
                raise ValueError("table is not associative")
        else:
            rng = np.random.default_rng(seed)
            a, b, c = rng.integers(0, N, (3, spot_checks))
            if not (mul[mul[a, b], c] == mul[a, mul[b, c]]).all():
                raise ValueError("table is not associative")
        labels = list(labels) if labels is not None else [str(i) for i in range(N)]
        return cls(name, "custom", labels, mul, inv, e)


def _class_labels(G: GroupTable) -> np.ndarray:
    if getattr(G, "_classes", None) is None:
        a = np.arange(len(G))
        orbits = G.mul[G.mul[a[:, None], a[None, :]], G.inv[:, None]]   # [x, a] -> x a x^-1
        G._classes = orbits.min(axis=0)
    return G._classes


def _perm_table(perms):
    index = {p: i for i, p in enumerate(perms)}
    N = len(perms)
    mul = np.empty((N, N), dtype=np.int64)
    for i, p in enumerate(perms):
        for j, r in enumerate(perms):
            mul[i, j] = index[tuple(p[k] for k in r)]      # (p r)(k) = p(r(k))
    inv = np.array([index[tuple(sorted(range(len(p)), key=lambda k: p[k]))] for p in perms])
    return mul, inv, index


def _cycle_str(p):
    seen, out = set(), []
    for s in range(len(p)):
        if s in seen or p[s] == s:
            continue
        cyc, k = [], s
        while k not in seen:
            seen.add(k)
            cyc.append(k + 1)
            k = p[k]
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


def _is_even(p):
    return sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j]) % 2 == 0


@lru_cache(maxsize=None)
def symmetric_group(n: int) -> GroupTable:
    perms = list(itertools.permutations(range(n)))
    mul, inv, index = _perm_table(perms)
    return GroupTable(f"S{n}", "symmetric", [_cycle_str(p) for p in perms], mul, inv, index[tuple(range(n))])


@lru_cache(maxsize=None)
def alternating_group(n: int) -> GroupTable:
    perms = [p for p in itertools.permutations(range(n)) if _is_even(p)]
    mul, inv, index = _perm_table(perms)
    return GroupTable(f"A{n}", "alternating", [_cycle_str(p) for p in perms], mul, inv, index[tuple(range(n))])


@lru_cache(maxsize=None)
def cyclic_group(n: int) -> GroupTable:
    a = np.arange(n)
    return GroupTable(f"C{n}", "cyclic", [str(i) for i in range(n)], (a[:, None] + a[None, :]) % n, (-a) % n, 0)


def matrix_group_table(kind: str, q: int, n: int, cap: int = 6000) -> GroupTable:
    """Multiplication table of an enumerated SL_n(q) / SU_3(q)."""
    G = enumerate_group(kind, q, n, cap)
    N = len(G)
    if N > cap:
        raise SizeCapExceeded(f"table for {G.name} needs {N} > {cap} elements")
    vf = vec_field(G.F)
    mul = np.empty((N, N), dtype=np.int64)
    for i in range(N):
        prod = vf.matmul(G.elems[i][None], G.elems)
        mul[i] = G.index_of_codes(encode(prod, G.F.order))
    ident = G.index_of(SquareMatrix.identity(G.F, n))
    inv = np.argmax(mul == ident, axis=1)
    mats = [G.matrix(i) for i in range(N)]
    return GroupTable(G.name, kind, [str(M) for M in mats], mul, inv, ident, mats)


@lru_cache(maxsize=None)
def sl2(q: int) -> GroupTable:
    return matrix_group_table("SL", q, 2)


def group_by_name(name: str, q: int | None = None, cap: int = 6000) -> GroupTable:
    """s3, s4, a4, c<n>, sl2 (with q), sl3 / su3 (with q, small)."""
    key = name.lower()
    if re.fullmatch(r"s\d", key):
        return symmetric_group(int(key[1:]))
    if re.fullmatch(r"a\d", key):
        return alternating_group(int(key[1:]))
    if re.fullmatch(r"c\d+", key):
        return cyclic_group(int(key[1:]))
    if key in ("sl2", "sl3", "su3"):
        if q is None:
            raise ValueError(f"group {name} needs q")
        if key == "sl2":
            return sl2(q)
        return matrix_group_table("SL" if key == "sl3" else "SU", q, 3, cap)
    raise ValueError(f"unknown group {name!r}")


# -- evaluation -------------------------------------------------------------------------

def _power_tables(G: GroupTable, exps):
    out = {}
    for e in exps:
        if e in out:
            continue
        a = np.arange(len(G)) if e > 0 else G.inv.copy()
        base = a.copy()
        r = np.full(len(G), G.identity)
        k = abs(e)
        while k:
            if k & 1:
                r = G.mul[r, base]
            base = G.mul[base, base]
            k >>= 1
        out[e] = r
    return out


def evaluate_many(w: Word, G: GroupTable, tuples: np.ndarray) -> np.ndarray:
    """w evaluated on each row of ``tuples`` (element indices)."""
    tuples = np.asarray(tuples, dtype=np.int64)
    if tuples.ndim != 2 or tuples.shape[1] < w.arity:
        raise ArityMismatch(f"need {w.arity} entries per tuple")
    pw = _power_tables(G, [e for _, e in w.letters])
    res = np.full(len(tuples), G.identity, dtype=np.int64)
    for l, e in w.letters:
        res = G.mul[res, pw[e][tuples[:, l - 1]]]
    return res


def evaluate(w: Word, elems, G: GroupTable | None = None):
    """Substitute ``elems`` into w.  With a table, elements are indices;
    otherwise they are matrices (or anything with @ and inverse())."""
    if len(elems) < w.arity:
        raise ArityMismatch(f"word has arity {w.arity}, got {len(elems)} elements")
    if G is not None:
        return int(evaluate_many(w, G, np.array([list(elems)]))[0])
    first = elems[0] if elems else None
    if first is None:
        raise ArityMismatch("cannot infer the identity without elements")
    acc = SquareMatrix.identity(first.spec, first.n)
    for l, e in w.letters:
        acc = acc @ (elems[l - 1] ** e)
    return acc


@dataclass
class ImageReport:
    word: Word
    group: str
    mode: str
    elements: list                  # sorted element indices
    symmetric: bool | None          # None: sampled mode cannot decide
    complete: bool
    tuples_evaluated: int

    def to_dict(self, G: GroupTable | None = None):
        return {"word": str(self.word), "group": self.group, "mode": self.mode, "size": len(self.elements),
                "elements": [G.labels[i] for i in self.elements] if G is not None else self.elements,
                "symmetric": self.symmetric, "complete": self.complete,
                "tuples_evaluated": self.tuples_evaluated}


def _image_block(args):
    w, G, d, lo, hi = args
    N = len(G)
    # tuples whose first coordinate lies in [lo, hi); remaining coordinates free
    rest = np.array(list(itertools.product(range(N), repeat=d - 1)), dtype=np.int64).reshape(N ** (d - 1), d - 1)
    firsts = np.arange(lo, hi, dtype=np.int64)
    T = np.concatenate([np.repeat(firsts, len(rest))[:, None], np.tile(rest, (len(firsts), 1))], axis=1)
    return np.unique(evaluate_many(w, G, T))


def _all_tuples_image(w, G, d, parallelism=0, block_rows=2 ** 20):
    N = len(G)
    if d == 0:
        return np.array([G.identity])
    per_first = N ** (d - 1)
    step = max(1, block_rows // per_first)
    jobs = [(w, G, d, lo, min(N, lo + step)) for lo in range(0, N, step)]
    if parallelism and parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as ex:
            parts = list(ex.map(_image_block, jobs))
    else:
        parts = [_image_block(j) for j in jobs]
    return np.unique(np.concatenate(parts))


def _closed_under_inverse(G, elems):
    s = set(int(x) for x in elems)
    return all(int(G.inv[x]) in s for x in s)


def word_image(w: Word, G: GroupTable, mode: str = "exhaustive", seed: int = 0, count: int = 10000,
               cap: int = DEFAULT_IMAGE_CAP, parallelism: int = 0) -> ImageReport:
    """w(G).  The exhaustive image is independent of how G^d is partitioned;
    the sampled image is only a lower bound."""
    d = max(w.arity, 1) if w.letters else 0
    if mode == "exhaustive":
        total = len(G) ** d
        if total > cap:
            raise SizeCapExceeded(f"|G|^{d} = {total} exceeds cap {cap}")
        img = _all_tuples_image(w, G, d, parallelism)
        return ImageReport(w, G.name, mode, img.tolist(), _closed_under_inverse(G, img), True, total)
    if mode == "sampled":
        rng = np.random.default_rng(seed)
        T = rng.integers(0, len(G), size=(count, max(d, 1)))
        img = np.unique(np.append(evaluate_many(w, G, T), G.identity))
        full = len(img) == len(G)
        return ImageReport(w, G.name, mode, img.tolist(), True if full else None, full, count)
    raise ValueError("mode must be exhaustive or sampled")


def random_word(rng, arity: int, max_len: int) -> Word:
    letters = [(int(rng.integers(1, arity + 1)), int(rng.choice([-2, -1, 1, 2, 3])))
               for _ in range(int(rng.integers(1, max_len + 1)))]
    return Word.make(letters, arity)


def reduced_words(arity: int, length: int):
    """Reduced words of exact letter-length ``length`` in canonical order:
    lexicographic on letter sequences with x < x^-1 < y < y^-1 < ..."""
    alphabet = [s * l for l in range(1, arity + 1) for s in (1, -1)]

    def rec(prefix):
        if len(prefix) == length:
            yield prefix
            return
        for a in alphabet:
            if prefix and prefix[-1] == -a:
                continue
            yield from rec(prefix + [a])

    for flat in rec([]):
        yield Word.make([(abs(a), 1 if a > 0 else -1) for a in flat], arity)


@dataclass
class SearchResult:
    witness: Word | None
    words_tried: int
    max_length: int
    arity: int
    inverse_identity_ok: bool

    @property
    def verdict(self) -> str:
        return "chiral_witness" if self.witness is not None else "no_witness_within_budget"

    def to_dict(self):
        return {"verdict": self.verdict, "witness": None if self.witness is None else str(self.witness),
                "words_tried": self.words_tried, "max_length": self.max_length, "arity": self.arity,
                "inverse_identity_ok": self.inverse_identity_ok}


def chirality_search(G: GroupTable, max_length: int = 4, arity: int = 2, cap: int = DEFAULT_IMAGE_CAP) -> SearchResult:
    """First word (by length, then canonical order) with w(G) != w(G)^-1.
    Along the way the identity w^-1(G) = w(G)^-1 is checked for every word."""
    if len(G) ** arity > cap:
        raise SizeCapExceeded(f"|G|^{arity} exceeds cap {cap}")
    T = np.array(list(itertools.product(range(len(G)), repeat=arity)), dtype=np.int64)
    tried = 0
    ok = True
    for L in range(1, max_length + 1):
        for w in reduced_words(arity, L):
            tried += 1
            vals = evaluate_many(w, G, T)
            ok &= bool((evaluate_many(w.inverse(), G, T) == G.inv[vals]).all())
            img = np.unique(vals)
            if not _closed_under_inverse(G, img):
                return SearchResult(w, tried, max_length, arity, ok)
    return SearchResult(None, tried, max_length, arity, ok)


# -- automorphisms ----------------------------------------------------------------------

def inner_automorphism(G: GroupTable, x: int) -> np.ndarray:
    return G.conj(x, np.arange(len(G)))


def matrix_automorphism(G: GroupTable, f) -> np.ndarray:
    """Permutation of G induced by a map on its matrices."""
    if G.matrices is None:
        raise ValueError("group has no matrix realisation")
    return np.array([G.index_of_matrix(f(M)) for M in G.matrices], dtype=np.int64)


def transpose_inverse(G: GroupTable) -> np.ndarray:
    return matrix_automorphism(G, lambda M: M.T.inverse())


def entrywise_frobenius(G: GroupTable, power: int = 1) -> np.ndarray:
    def frob(M):
        F = M.spec
        return SquareMatrix._raw(F, [[F.pow(x, F.p ** power) if x else 0 for x in r] for r in M.rows])
    return matrix_automorphism(G, frob)


def is_automorphism(G: GroupTable, perm) -> bool:
    perm = np.asarray(perm)
    if sorted(perm.tolist()) != list(range(len(G))):
        return False
    return bool((perm[G.mul] == G.mul[perm[:, None], perm[None, :]]).all())


def automorphism_invariance_check(w: Word, G: GroupTable, automorphisms, cap: int = DEFAULT_IMAGE_CAP) -> bool:
    """phi(w(G)) = w(G) for every supplied automorphism (index permutations)."""
    img = set(word_image(w, G, cap=cap).elements)
    for phi in automorphisms:
        phi = np.asarray(phi)
        if not is_automorphism(G, phi):
            raise ValueError("supplied map is not an automorphism")
        if {int(phi[x]) for x in img} != img:
            return False
    return True


def subgroup_indices(G: GroupTable, H: GroupTable) -> np.ndarray:
    """Indices in G of the elements of H, matched by label."""
    pos = {lab: i for i, lab in enumerate(G.labels)}
    return np.array([pos[lab] for lab in H.labels], dtype=np.int64)


def induced_inversions(G: GroupTable, N) -> dict:
    """For a normal subgroup N of G (indices into G): a -> least x in G with
    x a x^-1 = a^-1, when G supplies one.  Int_x restricted to N is then an
    automorphism of N inverting a."""
    N = np.asarray(N)
    members = set(N.tolist())
    everyone = np.arange(len(G))
    for x in everyone:
        if {int(y) for y in G.conj(int(x), N)} != members:
            raise ValueError("subgroup is not normal")
    out = {}
    for a in N.tolist():
        hits = np.nonzero(G.conj(everyone, a) == G.inv[a])[0]
        if len(hits):
            out[int(a)] = int(hits[0])
    return out


# -- inversion certificates -------------------------------------------------------------

@dataclass
class InversionCertificate:
    element: SquareMatrix
    kind: str
    automorphism: str           # "transpose_inverse_then_inner" | "inner"
    conjugator: SquareMatrix
    form: SquareMatrix | None = None

    def apply(self, y: SquareMatrix) -> SquareMatrix:
        x = self.conjugator
        if self.automorphism == "inner":
            return x @ y @ x.inverse()
        # psi = Int(x^-1) o gamma, gamma(y) = (y^T)^-1
        return x.inverse() @ y.T.inverse() @ x

    def verify(self) -> bool:
        g, x = self.element, self.conjugator
        if self.apply(g) != g.inverse():
            return False
        if self.kind == "SL":
            return x.det() != 0
        if self.kind in ("U", "SU"):
            return group_membership(x, "U")
        if self.kind == "Sp":
            return _symplectic_multiplier(x, self.form) is not None
        return False

    def to_dict(self):
        return {"element": str(self.element), "kind": self.kind, "automorphism": self.automorphism,
                "conjugator": str(self.conjugator), "verified": self.verify()}


def symplectic_form(F, n=4) -> SquareMatrix:
    h = n // 2
    rows = [[0] * n for _ in range(n)]
    for i in range(h):
        rows[i][h + i] = 1
        rows[h + i][i] = F.neg(1)
    return SquareMatrix._raw(F, rows)


def _symplectic_multiplier(x: SquareMatrix, J: SquareMatrix):
    """m with x^T J x = m J, m = +-1, else None."""
    lhs = x.T @ J @ x
    for m in (1, x.spec.neg(1)):
        if lhs == J.scale(x.spec.elem(m)):
            return m
    return None


@lru_cache(maxsize=4)
def extended_symplectic(q: int, n: int = 4):
    """Sp^{+-}_n(q): matrices with x^T J x = +-J, built by closure from
    symplectic transvections and a multiplier -1 element."""
    F = field_of_order(q)
    J = symplectic_form(F, n)
    vf = vec_field(F)
    Jn = np.array(J.rows, dtype=np.int64)
    gens = []
    for v in itertools.product(range(q), repeat=n):
        if not any(v) or next(x for x in v if x) != 1:
            continue
        # t_v(y) = y + (y^T J v) v  ->  matrix I + v (J v)^T ... as rows
        vv = np.array(v, dtype=np.int64)
        Jv = vf.matmul(Jn[None], vv[None, :, None])[0, :, 0]
        outer = vf.mul(vv[:, None], Jv[None, :])
        gens.append(vf.add(np.eye(n, dtype=np.int64), outer))
    h = n // 2
    gens.append(np.diag([1] * h + [F.neg(1)] * h).astype(np.int64))
    gens = np.array(gens)
    seen = encode(np.eye(n, dtype=np.int64)[None], F.order)
    frontier = np.eye(n, dtype=np.int64)[None]
    while len(frontier):
        prods = vf.matmul(frontier[:, None], gens[None]).reshape(-1, n, n)
        codes = encode(prods, F.order)
        codes, first = np.unique(codes, return_index=True)
        new = ~np.isin(codes, seen)
        frontier = prods[first[new]]
        seen = np.union1d(seen, codes[new])
    elems = _decode(seen, F.order, n)
    mult = np.array([_symplectic_multiplier(SquareMatrix._raw(F, e.tolist()), J) for e in elems])
    return F, J, elems, mult


def _decode(codes, Q, n):
    from .groups import decode
    return decode(codes, Q, n)


def inversion_certificate(g: SquareMatrix, kind: str = "SL", **kw) -> InversionCertificate:
    """psi with psi(g) = g^-1.  SL, U, SU: psi = Int(x^-1) o (transpose-inverse)
    with x g x^-1 = g^T, x in GL resp. U.  Sp: an element of the extended
    symplectic group inverting g by conjugation (small q only)."""
    kind = kind.upper() if kind.lower() != "sp" else "Sp"
    if kind == "SL":
        if not group_membership(g, "SL"):
            raise NotInAmbientGroup("element is not in SL")
        x = gl_conjugator(g, g.T)
    elif kind in ("U", "SU"):
        if not group_membership(g, kind):
            raise NotInAmbientGroup(f"element is not in {kind}")
        x = unitary_conjugator(g, g.T, **kw)
    elif kind == "Sp":
        F, J, elems, mult = extended_symplectic(g.spec.order, g.n)
        if g.spec is not F or _symplectic_multiplier(g, J) != 1:
            raise NotInAmbientGroup("element is not symplectic")
        vf = vec_field(F)
        G = np.array(g.rows, dtype=np.int64)
        Gi = np.array(g.inverse().rows, dtype=np.int64)
        hit = np.nonzero((vf.matmul(elems, G) == vf.matmul(Gi[None], elems)).all(axis=(1, 2)))[0]
        if not len(hit):
            raise CertificateNotFound("no element of the extended symplectic group inverts g")
        cert = InversionCertificate(g, "Sp", "inner", SquareMatrix._raw(F, elems[hit[0]].tolist()), J)
        assert cert.verify()
        return cert
    else:
        raise ValueError(f"unsupported kind {kind!r}")
    if x is None:
        raise CertificateNotFound("element not conjugate to its transpose; this contradicts the theory")
    cert = InversionCertificate(g, kind, "transpose_inverse_then_inner", x)
    if not cert.verify():  # pragma: no cover
        raise CertificateNotFound("certificate failed to verify")
    return cert
