"""Reproducible acceptance checks shared by ``chirality-lab verify`` and the
test suite.  Each check returns a CheckResult; nothing here prints."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

import numpy as np

from .conjugacy import brute_force_conjugator, decide_sl3, decide_su3, splitting_count
from .ffield import field_of_order, norm_one_subgroup, prime_power, quadratic_extension
from .g2 import ZornElement, chirality_verdict, is_multiplicative_on_basis, sl3_automorphism
from .groups import enumerate_group, group_classes
from .isolated import canonical_reps_sl3, canonical_reps_su3, enumerate_isolated, primitive_cube_roots
from .poly import Poly
from .matrix import SquareMatrix, group_membership, poly_invariants, random_invertible
from .wordmap import (chirality_search, cyclic_group, inversion_certificate, random_word, sl2,
                      symmetric_group, word_image)


def _str_keys(obj):
    # details are keyed by q (int) and by names; JSON with sorted keys needs one type
    if isinstance(obj, dict):
        return {str(k): _str_keys(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_str_keys(v) for v in obj]
    return obj


@dataclass
class CheckResult:
    key: str
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.key} {self.title} ({self.seconds:.1f}s)"

    def to_dict(self, timing=True):
        d = {"key": self.key, "title": self.title, "passed": self.passed, "detail": _str_keys(self.detail)}
        if timing:
            d["seconds"] = round(self.seconds, 3)
        return d


def _timed(key, title, fn, *a, **kw) -> CheckResult:
    t = time.perf_counter()
    passed, detail = fn(*a, **kw)
    return CheckResult(key, title, bool(passed), detail, time.perf_counter() - t)


def admissible(qmax: int):
    """Prime powers q <= qmax with characteristic other than 2 and 3."""
    return [q for q in range(5, qmax + 1) if (pp := prime_power(q)) and pp[0] not in (2, 3)]


def _triple_labels(report, alpha):
    return {c.label.split("(")[0] for c in report.isolated_classes() if c.alpha == alpha}


# -- 1 / 3: isolated censuses ------------------------------------------------------------

def sl3_census_exists(qs=(7, 13, 31)):
    detail, ok = {}, True
    for q in qs:
        r = enumerate_isolated(q, "SL3")
        per = {}
        for a in r.alpha_choices:
            labels = _triple_labels(r, a)
            # stored relation: w A1^T w^-1 = A2; direct decision: v A1 v^-1 = A2^T
            rel = r.relation(f"A1(a={a})", "transpose")
            A1 = r.record(f"A1(a={a})").rep
            A2 = r.record(f"A2(a={a})").rep
            w = rel.witness if rel is not None else None
            linked = (rel is not None and rel.target == f"A2(a={a})" and w @ A1.T == A2 @ w and w.det() == 1)
            direct = decide_sl3(A1, A2.T)
            v = direct.witness
            linked = linked and direct.conjugate and v @ A1 == A2.T @ v and v.det() == 1
            per[str(a)] = {"isolated": sorted(labels), "A1_conjugate_to_A2_transpose": bool(linked),
                           "witness": None if v is None else str(v)}
            ok &= labels == {"A1", "A2"} and linked
        ok &= r.theorem_verdict.exists
        detail[q] = {"verdict": r.theorem_verdict.verdict, "alphas": per}
    return ok, detail


def sl3_census_absent(qs=(19, 37)):
    detail, ok = {}, True
    for q in qs:
        r = enumerate_isolated(q, "SL3")
        detail[q] = {"verdict": r.theorem_verdict.verdict, "isolated_found": r.class_count_isolated,
                     "isolated_reps": [f"{c.label}: {c.rep}" for c in r.isolated_classes()]}
        ok &= (not r.theorem_verdict.exists) and r.class_count_isolated == 0
    return ok, detail


def su3_census_exists(qs=(5, 11, 23)):
    detail, ok = {}, True
    for q in qs:
        r = enumerate_isolated(q, "SU3")
        per = {}
        for a in r.alpha_choices:
            labels = _triple_labels(r, a)
            A1 = r.record(f"A1(a={a})").rep
            F = A1.spec
            g = SquareMatrix.diag(F, [-1, 1, -1])
            lu3 = g @ A1 @ g.inverse() == A1.bar().inverse() and group_membership(g, "SU")
            per[str(a)] = {"isolated": sorted(labels), "A1_witness_diag(-1,1,-1)": bool(lu3)}
            ok &= labels == {"A", "A2"} and lu3 and not r.record(f"A1(a={a})").is_isolated
        ok &= r.theorem_verdict.exists
        detail[q] = {"verdict": r.theorem_verdict.verdict, "alphas": per}
    return ok, detail


def su3_census_absent(qs=(17,)):
    detail, ok = {}, True
    for q in qs:
        r = enumerate_isolated(q, "SU3")
        detail[q] = {"verdict": r.theorem_verdict.verdict, "isolated_found": r.class_count_isolated,
                     "isolated_reps": [f"{c.label}: {c.rep}" for c in r.isolated_classes()]}
        ok &= (not r.theorem_verdict.exists) and r.class_count_isolated == 0
    return ok, detail


# -- 2: SL3(7) oracle -----------------------------------------------------------------

def sl3_oracle(q=7):
    r = enumerate_isolated(q, "SL3", mode="oracle")
    o = r.oracle
    detail = {"group_order": o["group_order"], "class_count": o["class_count"],
              "oracle_isolated": o["isolated_count"], "criterion_isolated": r.class_count_isolated,
              "isolated_reps": o["isolated_reps"]}
    return o["agrees"] and o["isolated_count"] == r.class_count_isolated, detail


# -- 4: SU3(5) oracle -----------------------------------------------------------------

def su3_oracle(q=5, random_pairs=100, seed=0):
    G = enumerate_group("SU", q, 3)
    U = enumerate_group("U", q, 3)
    pairs = []
    for a in primitive_cube_roots(q, "SU3"):
        trip = canonical_reps_su3(q, a)
        for M in trip:
            pairs += [(M, M.bar().inverse()), (M, M.inverse()), (M, M.T), (M, M)]
        pairs += [(trip[i], trip[j]) for i in range(3) for j in range(3) if i != j]
    rng = np.random.default_rng(seed)
    for _ in range(random_pairs):
        X = G.matrix(int(rng.integers(len(G))))
        h = U.matrix(int(rng.integers(len(U))))
        pairs.append((X, h @ X @ h.inverse()))
    mismatches = []
    for A, B in pairs:
        dec = decide_su3(A, B)
        bf = brute_force_conjugator(A, B, "SU", q)
        if dec.conjugate != (bf is not None):
            mismatches.append((str(A), str(B)))
    P = group_classes("U", q)
    keys = [poly_invariants(P.rep_matrix(c)).key() for c in range(P.count)]
    injective = len(set(keys)) == len(keys)
    detail = {"su3_order": len(G), "pairs": len(pairs), "mismatches": mismatches,
              "u3_classes": P.count, "distinct_gl_invariants": len(set(keys))}
    return not mismatches and injective, detail


# -- 5: splitting counts -------------------------------------------------------------

def _sl_jordan(F, a):
    return SquareMatrix(F, [[a, 1, 0], [0, a, 1], [0, 0, a]])


def _su_jordan(F, a):
    one = F.one
    return SquareMatrix(F, [[a, -(a * a), -a / (one + a * a)], [0, a, 1], [0, 0, a]])


def splitting_sweep(qmax=31, oracle_groups=(("SL", 5), ("SL", 7), ("SU", 5))):
    detail, ok = {}, True
    for q in admissible(qmax):
        F = field_of_order(q)
        roots = [x for x in F.units() if x ** 3 == F.one]
        sl = {str(a): splitting_count(_sl_jordan(F, a), "GL/SL") for a in roots}
        K = quadratic_extension(q)
        uroots = [x for x in norm_one_subgroup(q).elements if x ** 3 == K.one]
        su = {str(a): splitting_count(_su_jordan(K, a), "U/SU") for a in uroots}
        ok &= all(v == (3 if (q - 1) % 3 == 0 else 1) for v in sl.values())
        ok &= all(v == (3 if (q + 1) % 3 == 0 else 1) for v in su.values())
        detail[q] = {"SL": sl, "SU": su}
    oracle = {}
    for kind, q in oracle_groups:
        P = group_classes(kind, q)
        F = P.group.F
        expected_split = 3 if ((q - 1) if kind == "SL" else (q + 1)) % 3 == 0 else 1
        counts = {}
        for c in range(P.count):
            inv = poly_invariants(P.rep_matrix(c))
            if inv.is_regular() and len(inv.invariant_factors) == 1:
                chi = inv.char_poly
                lam = chi.roots()
                if len(lam) == 1 and lam[0] ** 3 == F.one and Poly.linear(F, lam[0]) ** 3 == chi:
                    counts.setdefault(str(lam[0]), []).append(int(P.sizes[c]))
        good = all(len(s) == expected_split and len(set(s)) == 1 for s in counts.values()) and counts
        oracle[f"{kind}3({q})"] = {"classes_per_eigenvalue": {k: len(v) for k, v in counts.items()},
                                   "expected": expected_split}
        ok &= bool(good)
    detail["oracle"] = oracle
    return ok, detail


# -- 6: G2 criterion -----------------------------------------------------------------

SPOT = {7: (True, "SL3"), 13: (True, "SL3"), 19: (False, "none"), 5: (True, "SU3"), 17: (False, "none"),
        23: (True, "SU3")}


def g2_sweep(qmax=49):
    detail, ok = {}, True
    for q in admissible(qmax):
        v = chirality_verdict(q)
        good = v.consistent
        if v.chiral:
            good &= v.witness_source == ("SL3" if v.case1 else "SU3")
            good &= v.witness_certificate is not None and v.witness_certificate.isolated
        else:
            good &= v.witness_source == "none" and v.witness_class is None
        if q in SPOT:
            good &= (v.chiral, v.witness_source) == SPOT[q]
        ok &= good
        detail[q] = {"chiral": v.chiral, "source": v.witness_source, "consistent": v.consistent}
    return ok, detail


# -- 7: inversion certificates ----------------------------------------------------------

def certificates(groups=(("SL", 2), ("SL", 3), ("SU", 3))):
    detail, ok = {}, True
    for kind, q in groups:
        G = enumerate_group(kind, q, 3)
        good = sum(inversion_certificate(G.matrix(i), kind).verify() for i in range(len(G)))
        detail[f"{kind}3({q})"] = f"{good}/{len(G)}"
        ok &= good == len(G)
    return ok, detail


# -- 8: word maps -------------------------------------------------------------------------

def _conjugation_closed(G, img):
    s = np.zeros(len(G), dtype=bool)
    s[img] = True
    a = np.array(img)
    return all(s[G.conj(x, a)].all() for x in range(len(G)))


def wordmap_properties(n_words=50, seed=0):
    rng = np.random.default_rng(seed)
    detail, ok = {}, True
    for G in (symmetric_group(3), symmetric_group(4), cyclic_group(9), sl2(3)):
        bad = 0
        for _ in range(n_words):
            w = random_word(rng, 2, 5)
            img = word_image(w, G).elements
            inv_img = word_image(w.inverse(), G).elements
            good = sorted(int(G.inv[x]) for x in img) == inv_img
            good &= G.identity in img
            good &= _conjugation_closed(G, img)
            bad += not good
        detail[G.name] = {"words": n_words, "failures": bad}
        ok &= bad == 0
    searches = {}
    for G in [cyclic_group(n) for n in range(2, 13)] + [symmetric_group(4)]:
        res = chirality_search(G, 4, 2)
        searches[G.name] = res.verdict
        ok &= res.witness is None and res.inverse_identity_ok
    detail["search"] = searches
    return ok, detail


# -- 9: octonions -----------------------------------------------------------------------

def _random_sl3(F, rng):
    M = random_invertible(F, 3, rng)
    return SquareMatrix.diag(F, [M.det().inverse(), 1, 1]) @ M


def octonions(q=7, n_auto=100, n_pairs=50, n_norm=1000, seed=0):
    F = field_of_order(q)
    rng = random.Random(seed)
    mult = sum(is_multiplicative_on_basis(sl3_automorphism(_random_sl3(F, rng)), F) for _ in range(n_auto))
    fixes = all(sl3_automorphism(_random_sl3(F, rng))(ZornElement(F, a, b)) == ZornElement(F, a, b)
                for a in range(q) for b in range(q))
    basis = ZornElement.basis(F)
    comp = 0
    for _ in range(n_pairs):
        A, B = _random_sl3(F, rng), _random_sl3(F, rng)
        pa, pb, pab = sl3_automorphism(A), sl3_automorphism(B), sl3_automorphism(A @ B)
        comp += all(pab(x) == pa(pb(x)) for x in basis)
    norm_ok = 0
    for _ in range(n_norm):
        x, y = ZornElement.random(F, rng), ZornElement.random(F, rng)
        norm_ok += (x * y).norm() == x.norm() * y.norm()
    detail = {"multiplicative": f"{mult}/{n_auto}", "fixes_diagonal": fixes, "composition": f"{comp}/{n_pairs}",
              "norm_multiplicative": f"{norm_ok}/{n_norm}"}
    return mult == n_auto and fixes and comp == n_pairs and norm_ok == n_norm, detail


# -- 5 extra: SL3 oracle agreement used by the oracle suite -------------------------------

def sl3_decider_agreement(qs=(5, 7), random_pairs=100, seed=0):
    detail, ok = {}, True
    for q in qs:
        G = enumerate_group("SL", q, 3)
        F = G.F
        rng = np.random.default_rng(seed)
        pyrng = random.Random(seed)
        pairs = []
        if q % 3 == 1:
            for a in primitive_cube_roots(q, "SL3"):
                trip = canonical_reps_sl3(q, a)
                for M in trip:
                    pairs += [(M, M.T), (M, M.inverse()), (M, M.T.inverse()), (M, M)]
                pairs += [(trip[i], trip[j]) for i in range(3) for j in range(3) if i != j]
        for _ in range(random_pairs):
            X = G.matrix(int(rng.integers(len(G))))
            h = random_invertible(F, 3, pyrng)
            pairs.append((X, h @ X @ h.inverse()))
        mism = 0
        for A, B in pairs:
            mism += decide_sl3(A, B).conjugate != (brute_force_conjugator(A, B, "SL", q) is not None)
        detail[q] = {"pairs": len(pairs), "mismatches": mism}
        ok &= mism == 0
    return ok, detail


# -- suites ------------------------------------------------------------------------------

def run_suite(suite: str, qmax: int = 31):
    """Checks grouped as in the CLI; returns a list of CheckResults."""
    out = []
    if suite in ("theorems", "all"):
        out += [
            _timed("1a", "SL3 isolated census, q in {7,13,31}", sl3_census_exists,
                   tuple(q for q in (7, 13, 31) if q <= qmax)),
            _timed("1b", "SL3 no isolated classes, q in {19,37}", sl3_census_absent),
            _timed("3a", "SU3 isolated census, q in {5,11,23}", su3_census_exists,
                   tuple(q for q in (5, 11, 23) if q <= qmax)),
            _timed("3b", "SU3 no isolated classes, q = 17", su3_census_absent),
            _timed("5", "splitting counts", splitting_sweep, qmax, ()),
            _timed("6", "G2 criterion phrasings and witnesses", g2_sweep, max(qmax, 49)),
            _timed("9", "octonion embedding", octonions),
        ]
    if suite in ("oracle", "all"):
        out += [
            _timed("2", "SL3(7) oracle census", sl3_oracle),
            _timed("4", "SU3(5) oracle agreement", su3_oracle),
            _timed("5o", "splitting counts by oracle class sizes", splitting_sweep, 0),
            _timed("O", "decide_sl3 vs brute force on SL3(5), SL3(7)", sl3_decider_agreement),
        ]
    if suite in ("wordmap", "all"):
        out += [
            _timed("7", "inversion certificates", certificates),
            _timed("8", "word-map properties", wordmap_properties),
        ]
    if not out:
        raise ValueError(f"unknown suite {suite!r}")
    return out
