"""Vectorised enumeration of small matrix groups and brute-force class
partitions.  This is the oracle layer: nothing here uses the invariant-factor
or norm-criterion machinery.

Group elements are stored as int arrays of field indices, shape (N, n, n),
sorted by their integer code, which is the canonical (row-major) order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import SizeCapExceeded, WrongTower
from .ffield import FieldSpec, field_of_order, quadratic_extension
from .matrix import SquareMatrix

DEFAULT_ENUM_CAP = 10 ** 7
TABLE_LIMIT = 2500


class VecField:
    """numpy lookup tables for a small field."""

    def __init__(self, F: FieldSpec):
        if F.order > TABLE_LIMIT:
            raise SizeCapExceeded(f"F_{F.order} too large for table arithmetic")
        self.F = F
        self.Q = Q = F.order
        self.prime = F.n == 1
        idx = np.arange(Q)
        self.neg_t = np.array([F.neg(i) for i in range(Q)], dtype=np.int64)
        self.inv_t = np.array([F.inv(i) if i else 0 for i in range(Q)], dtype=np.int64)
        if not self.prime:
            self.add_t = np.array([[F.add(a, b) for b in range(Q)] for a in range(Q)], dtype=np.int64)
            self.mul_t = np.array([[F.mul(a, b) for b in range(Q)] for a in range(Q)], dtype=np.int64)
        self.bar_t = np.array([F.bar_index(i) for i in range(Q)], dtype=np.int64) if F.n % 2 == 0 else None
        self.idx = idx

    def add(self, a, b):
        if self.prime:
            return (a + b) % self.Q
        return self.add_t[a, b]

    def sub(self, a, b):
        return self.add(a, self.neg_t[b])

    def mul(self, a, b):
        if self.prime:
            return (a * b) % self.Q
        return self.mul_t[a, b]

    def matmul(self, A, B):
        """Batched product; A and B broadcast over leading axes."""
        A = np.asarray(A)
        B = np.asarray(B)
        if self.prime:
            return np.matmul(A, B) % self.Q
        n = A.shape[-1]
        Ae = A[..., :, :, None]        # (..., i, k, 1)
        Be = B[..., None, :, :]        # (..., 1, k, j)
        prods = self.mul_t[Ae, Be]     # (..., i, k, j)
        acc = prods[..., :, 0, :]
        for k in range(1, n):
            acc = self.add_t[acc, prods[..., :, k, :]]
        return acc

    def bar(self, A):
        if self.bar_t is None:
            raise WrongTower("no quadratic structure")
        return self.bar_t[A]

    def det3(self, M):
        a = M
        t1 = self.mul(a[:, 0, 0], self.sub(self.mul(a[:, 1, 1], a[:, 2, 2]), self.mul(a[:, 1, 2], a[:, 2, 1])))
        t2 = self.mul(a[:, 0, 1], self.sub(self.mul(a[:, 1, 0], a[:, 2, 2]), self.mul(a[:, 1, 2], a[:, 2, 0])))
        t3 = self.mul(a[:, 0, 2], self.sub(self.mul(a[:, 1, 0], a[:, 2, 1]), self.mul(a[:, 1, 1], a[:, 2, 0])))
        return self.add(self.sub(t1, t2), t3)

    def det2(self, M):
        return self.sub(self.mul(M[:, 0, 0], M[:, 1, 1]), self.mul(M[:, 0, 1], M[:, 1, 0]))

    def adjugate3(self, M):
        """Adjugate (= inverse when det = 1) of a batch of 3x3 matrices."""
        out = np.empty_like(M)
        for i in range(3):
            for j in range(3):
                r = [x for x in range(3) if x != j]
                c = [x for x in range(3) if x != i]
                minor = self.sub(self.mul(M[:, r[0], c[0]], M[:, r[1], c[1]]),
                                 self.mul(M[:, r[0], c[1]], M[:, r[1], c[0]]))
                out[:, i, j] = minor if (i + j) % 2 == 0 else self.neg_t[minor]
        return out

    def adjugate2(self, M):
        out = np.empty_like(M)
        out[:, 0, 0] = M[:, 1, 1]
        out[:, 1, 1] = M[:, 0, 0]
        out[:, 0, 1] = self.neg_t[M[:, 0, 1]]
        out[:, 1, 0] = self.neg_t[M[:, 1, 0]]
        return out


@lru_cache(maxsize=None)
def vec_field(F: FieldSpec) -> VecField:
    return VecField(F)


def all_vectors(Q: int, n: int) -> np.ndarray:
    """Every vector of F^n in canonical order, shape (Q^n, n)."""
    grids = np.indices((Q,) * n).reshape(n, -1).T
    return np.ascontiguousarray(grids, dtype=np.int64)


def encode(elems: np.ndarray, Q: int) -> np.ndarray:
    n2 = elems.shape[-1] * elems.shape[-2]
    flat = elems.reshape(-1, n2).astype(np.int64)
    weights = np.array([Q ** (n2 - 1 - k) for k in range(n2)], dtype=np.int64)
    return flat @ weights


def decode(codes: np.ndarray, Q: int, n: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    out = np.empty((codes.shape[0], n * n), dtype=np.int64)
    c = codes.copy()
    for k in range(n * n - 1, -1, -1):
        out[:, k] = c % Q
        c //= Q
    return out.reshape(-1, n, n)


# -- group orders -------------------------------------------------------------

def order_gl(n, q):
    return math.prod(q ** n - q ** i for i in range(n))


def order_sl(n, q):
    return order_gl(n, q) // (q - 1)


def order_u(n, q):
    return q ** (n * (n - 1) // 2) * math.prod(q ** i - (-1) ** i for i in range(1, n + 1))


def order_su(n, q):
    return order_u(n, q) // (q + 1)


@dataclass
class EnumeratedGroup:
    name: str
    kind: str
    q: int
    F: FieldSpec
    n: int
    elems: np.ndarray
    codes: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.codes)

    @property
    def vf(self) -> VecField:
        return vec_field(self.F)

    def index_of_codes(self, codes):
        pos = np.searchsorted(self.codes, codes)
        pos = np.minimum(pos, len(self.codes) - 1)
        found = self.codes[pos] == codes
        return np.where(found, pos, -1)

    def index_of(self, M: SquareMatrix) -> int:
        code = encode(np.array([M.rows], dtype=np.int64), self.F.order)
        return int(self.index_of_codes(code)[0])

    def __contains__(self, M: SquareMatrix) -> bool:
        return self.index_of(M) >= 0

    def matrix(self, i: int) -> SquareMatrix:
        return SquareMatrix._raw(self.F, self.elems[i].tolist())

    def inverses(self) -> np.ndarray:
        """Inverse of every element (adjugate for determinant-one groups)."""
        vf = self.vf
        if self.kind in ("SL", "SU"):
            return vf.adjugate3(self.elems) if self.n == 3 else vf.adjugate2(self.elems)
        if self.kind == "U" and self.n == 3:
            # A^{-1} = B bar(A)^T B for the antidiagonal form B
            Bt = np.transpose(vf.bar(self.elems), (0, 2, 1))
            return Bt[:, ::-1, ::-1]
        raise NotImplementedError(self.kind)


def _sorted_group(name, kind, q, F, n, elems):
    codes = encode(elems, F.order)
    order = np.argsort(codes, kind="stable")
    return EnumeratedGroup(name, kind, q, F, n, np.ascontiguousarray(elems[order]), codes[order])


def _check_cap(size, cap, name):
    if size > cap:
        raise SizeCapExceeded(f"|{name}| = {size} exceeds enumeration cap {cap}")


@lru_cache(maxsize=8)
def enumerate_sl(n: int, q: int, cap: int = DEFAULT_ENUM_CAP) -> EnumeratedGroup:
    """SL_n(q), n in {2, 3}: free first rows, last row solving det = 1."""
    name = f"SL{n}({q})"
    _check_cap(order_sl(n, q), cap, name)
    F = field_of_order(q)
    vf = vec_field(F)
    Q = F.order
    V = all_vectors(Q, n)
    nz = V[1:]
    if n == 2:
        # det [[a,b],[c,d]] = a d - b c: last row (c, d) dotted with (-b, a) equals 1
        coeff = np.stack([vf.neg_t[nz[:, 1]], nz[:, 0]], axis=1)
        firsts = nz[:, None, :]
        coeffs = coeff
    elif n == 3:
        r1 = np.repeat(nz, len(nz), axis=0)
        r2 = np.tile(nz, (len(nz), 1))
        cross = np.stack([
            vf.sub(vf.mul(r1[:, 1], r2[:, 2]), vf.mul(r1[:, 2], r2[:, 1])),
            vf.sub(vf.mul(r1[:, 2], r2[:, 0]), vf.mul(r1[:, 0], r2[:, 2])),
            vf.sub(vf.mul(r1[:, 0], r2[:, 1]), vf.mul(r1[:, 1], r2[:, 0])),
        ], axis=1)
        keep = cross.any(axis=1)
        firsts = np.stack([r1[keep], r2[keep]], axis=1)
        coeffs = cross[keep]
    else:
        raise NotImplementedError("SL_n enumeration for n in {2, 3}")
    chunks = []
    step = max(1, 4_000_000 // len(V))
    for s in range(0, len(coeffs), step):
        c = coeffs[s:s + step]
        prods = vf.mul(V[None, :, :], c[:, None, :])
        dots = prods[:, :, 0]
        for k in range(1, n):
            dots = vf.add(dots, prods[:, :, k])
        pi, vi = np.nonzero(dots == 1)
        block = np.concatenate([firsts[s:s + step][pi], V[vi][:, None, :]], axis=1)
        chunks.append(block)
    elems = np.concatenate(chunks).astype(np.int64)
    return _sorted_group(name, "SL", q, F, n, elems)


def _herm(vf, u, v):
    """h(u, v) = sum_i u_i bar(v_{n-1-i}), broadcasting over leading axes."""
    n = u.shape[-1]
    acc = None
    for i in range(n):
        t = vf.mul(u[..., i], vf.bar_t[v[..., n - 1 - i]])
        acc = t if acc is None else vf.add(acc, t)
    return acc


@lru_cache(maxsize=4)
def enumerate_u3(q: int, special: bool = True, cap: int = DEFAULT_ENUM_CAP) -> EnumeratedGroup:
    """U_3(q) or SU_3(q) for the antidiagonal form, built column by column
    from the hermitian conditions h(col_k, col_l) = [k + l = 2]."""
    name = f"{'SU' if special else 'U'}3({q})"
    _check_cap(order_u(3, q), cap, f"U3({q})")
    F = quadratic_extension(q)
    vf = vec_field(F)
    V = all_vectors(F.order, 3)
    hvv = _herm(vf, V, V)
    iso = V[1:][hvv[1:] == 0]
    blocks = []
    for c1 in iso:
        h1 = _herm(vf, c1[None, :], V)
        S2 = V[(h1 == 0) & (hvv == 1)]
        S3 = V[(h1 == 1) & (hvv == 0)]
        if not len(S2) or not len(S3):
            continue
        h23 = _herm(vf, S2[:, None, :], S3[None, :, :])
        i2, i3 = np.nonzero(h23 == 0)
        cols = np.stack([np.broadcast_to(c1, (len(i2), 3)), S2[i2], S3[i3]], axis=2)
        blocks.append(cols)
    elems = np.concatenate(blocks).astype(np.int64)
    if special:
        elems = elems[vf.det3(elems) == 1]
    return _sorted_group(name, "SU" if special else "U", q, F, 3, elems)


def enumerate_group(kind: str, q: int, n: int = 3, cap: int = DEFAULT_ENUM_CAP) -> EnumeratedGroup:
    kind = kind.upper()
    if kind == "SL":
        return enumerate_sl(n, q, cap)
    if kind in ("SU", "U") and n == 3:
        return enumerate_u3(q, kind == "SU", cap)
    raise NotImplementedError(f"enumeration of {kind}_{n}")


# -- generators and class partitions ------------------------------------------

def transvection_generators(n: int, q: int):
    """E_ij(b) for all i != j and b in an F_p-basis of F_q: generates SL_n(q)."""
    F = field_of_order(q)
    basis = [F.p ** k for k in range(F.n)]  # indices of 1, t, t^2, ...
    gens = []
    for i in range(n):
        for j in range(n):
            if i != j:
                for b in basis:
                    rows = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
                    rows[i][j] = b
                    gens.append(SquareMatrix._raw(F, rows))
    return gens


def cayley_components(group: EnumeratedGroup, gens) -> int:
    """Number of connected components of the right-multiplication Cayley graph;
    1 iff ``gens`` generate the group."""
    vf = group.vf
    N = len(group)
    rows, cols = [], []
    for g in gens:
        prod = vf.matmul(group.elems, np.array(g.rows, dtype=np.int64))
        tgt = group.index_of_codes(encode(prod, group.F.order))
        if (tgt < 0).any():
            raise ValueError("generator does not preserve the group")
        rows.append(np.arange(N))
        cols.append(tgt)
    graph = coo_matrix((np.ones(N * len(gens), dtype=np.int8), (np.concatenate(rows), np.concatenate(cols))),
                       shape=(N, N))
    ncomp, _ = connected_components(graph, directed=True, connection="weak")
    return ncomp


def _conjugate_batch(vf, elems, g, ginv):
    return vf.matmul(vf.matmul(g, elems), ginv)


@dataclass
class ClassPartition:
    group: EnumeratedGroup
    labels: np.ndarray          # class id per element; ids ordered by representative
    reps: np.ndarray            # element index of each class representative (least element)
    sizes: np.ndarray

    @property
    def count(self):
        return len(self.reps)

    def label_of(self, M: SquareMatrix) -> int:
        i = self.group.index_of(M)
        if i < 0:
            raise ValueError("matrix not in group")
        return int(self.labels[i])

    def rep_matrix(self, c: int) -> SquareMatrix:
        return self.group.matrix(int(self.reps[c]))

    def labels_of_images(self, images: np.ndarray) -> np.ndarray:
        idx = self.group.index_of_codes(encode(images, self.group.F.order))
        if (idx < 0).any():
            raise ValueError("image leaves the group")
        return self.labels[idx]


def class_partition(group: EnumeratedGroup, gens) -> ClassPartition:
    """Conjugacy classes as connected components of the graph M -> g M g^{-1},
    g running over a generating set.  Components are relabelled so that class
    ids increase with their least element."""
    vf = group.vf
    N = len(group)
    src, dst = [], []
    chunk = 1_000_000
    for g in gens:
        G = np.array(g.rows, dtype=np.int64)
        Gi = np.array(g.inverse().rows, dtype=np.int64)
        for s in range(0, N, chunk):
            conj = _conjugate_batch(vf, group.elems[s:s + chunk], G, Gi)
            tgt = group.index_of_codes(encode(conj, group.F.order))
            if (tgt < 0).any():
                raise ValueError("conjugation leaves the group")
            src.append(np.arange(s, s + len(tgt)))
            dst.append(tgt)
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(N, N))
    ncomp, raw = connected_components(graph, directed=True, connection="weak")
    first = np.full(ncomp, N, dtype=np.int64)
    np.minimum.at(first, raw, np.arange(N))
    order = np.argsort(first)
    relabel = np.empty(ncomp, dtype=np.int64)
    relabel[order] = np.arange(ncomp)
    labels = relabel[raw]
    return ClassPartition(group, labels, first[order], np.bincount(labels, minlength=ncomp))


def su3_generators(q: int, seed: int = 0, count: int = 3):
    """A few seeded random elements of SU_3(q), checked to generate it."""
    G = enumerate_u3(q, True)
    rng = np.random.default_rng(seed)
    for _ in range(20):
        picks = sorted(rng.choice(len(G), size=count, replace=False).tolist())
        gens = [G.matrix(i) for i in picks]
        if cayley_components(G, gens) == 1:
            return gens
    raise RuntimeError("could not find generators")  # pragma: no cover


def u3_generators(q: int, seed: int = 0):
    """SU_3 generators plus diag(1, z, 1), z generating the norm-one group."""
    from .ffield import norm_one_subgroup

    gens = su3_generators(q, seed)
    F = quadratic_extension(q)
    z = norm_one_subgroup(q).generator
    return gens + [SquareMatrix.diag(F, [F.one, z, F.one])]


def generators_for(group: EnumeratedGroup):
    if group.kind == "SL":
        return transvection_generators(group.n, group.q)
    if group.kind == "SU":
        return su3_generators(group.q)
    if group.kind == "U":
        return u3_generators(group.q)
    raise NotImplementedError(group.kind)


@lru_cache(maxsize=4)
def _cached_partition(kind, q, n):
    G = enumerate_group(kind, q, n)
    return class_partition(G, generators_for(G))


def group_classes(kind: str, q: int, n: int = 3) -> ClassPartition:
    return _cached_partition(kind.upper(), q, n)


# -- brute-force conjugator scans ---------------------------------------------

def _entry00(vf, X, A, B):
    """(X A)[0,0] and (B X)[0,0] for a batch X: a cheap pre-filter."""
    n = X.shape[-1]
    lhs = vf.mul(X[:, 0, 0], A[0, 0])
    rhs = vf.mul(B[0, 0], X[:, 0, 0])
    for k in range(1, n):
        lhs = vf.add(lhs, vf.mul(X[:, 0, k], A[k, 0]))
        rhs = vf.add(rhs, vf.mul(B[0, k], X[:, k, 0]))
    return lhs == rhs


def _scan_chunk(args):
    elems, A, B, Q, prime, tables = args
    vf = tables if tables is not None else _PrimeOps(Q)
    cand = np.nonzero(_entry00(vf, elems, A, B))[0]
    if not len(cand):
        return -1
    X = elems[cand]
    if prime:
        lhs = np.matmul(X, A) % Q
        rhs = np.matmul(B, X) % Q
    else:
        lhs = vf.matmul(X, A)
        rhs = vf.matmul(B, X)
    hit = np.nonzero((lhs == rhs).all(axis=(1, 2)))[0]
    return int(cand[hit[0]]) if len(hit) else -1


class _PrimeOps:
    def __init__(self, Q):
        self.Q = Q

    def add(self, a, b):
        return (a + b) % self.Q

    def mul(self, a, b):
        return (a * b) % self.Q


def scan_conjugator(group: EnumeratedGroup, A: SquareMatrix, B: SquareMatrix, parallelism: int = 0,
                    chunk: int = 500_000):
    """Least element index g with g A g^{-1} = B, or -1.  Chunks are scanned
    in order and the first hit in canonical order wins, so the answer does not
    depend on how the scan is partitioned."""
    Aa = np.array(A.rows, dtype=np.int64)
    Ba = np.array(B.rows, dtype=np.int64)
    vf = group.vf
    jobs = [(group.elems[s:s + chunk], Aa, Ba, group.F.order, vf.prime, None if vf.prime else vf)
            for s in range(0, len(group), chunk)]
    offsets = list(range(0, len(group), chunk))
    if parallelism and parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as ex:
            results = list(ex.map(_scan_chunk, jobs))
    else:
        results = []
        for job in jobs:
            r = _scan_chunk(job)
            results.append(r)
            if r >= 0:
                break
    for off, r in zip(offsets, results):
        if r >= 0:
            return off + r
    return -1
