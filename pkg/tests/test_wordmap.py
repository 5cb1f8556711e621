"""Word parsing, evaluation, images, chirality search and inversion
certificates.  Images on S_3 and S_4 are cross-checked by a plain Python
evaluation over permutation tuples, compared through cycle types."""

import itertools
import re

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chirality_lab.errors import ArityExceeded, ArityMismatch, NotInAmbientGroup, ParseError, SizeCapExceeded
from chirality_lab.ffield import field_of_order
from chirality_lab.groups import enumerate_group
from chirality_lab.matrix import SquareMatrix
from chirality_lab.wordmap import (GroupTable, Word, alternating_group, automorphism_invariance_check,
                                   chirality_search, cyclic_group, entrywise_frobenius, evaluate,
                                   extended_symplectic, induced_inversions, inner_automorphism, inversion_certificate,
                                   is_automorphism, parse_word, random_word, reduced_words, sl2, subgroup_indices,
                                   symmetric_group, transpose_inverse, word_image)


# -- parsing ---------------------------------------------------------------------------

def test_parse_examples():
    w = parse_word("x^2*y^-1*x")
    assert w.letters == ((1, 2), (2, -1), (1, 1)) and w.arity == 2
    assert parse_word("[x,y]").letters == ((1, 1), (2, 1), (1, -1), (2, -1))
    assert parse_word("x*x^-1").letters == ()
    assert str(parse_word("x*x^-1")) == "1"
    assert parse_word("(x y)^2") == parse_word("x*y*x*y")
    assert parse_word("(x*y)^-1") == parse_word("y^-1 x^-1")
    assert parse_word("g1*g4").arity == 4
    assert str(parse_word("g1 g4^-2")) == "g1*g4^-2"
    assert parse_word("[[x,y],z]").length == 10


@pytest.mark.parametrize("text,pos", [("x**y", 2), ("x^0", 2), ("x^", 2), ("(x", 2), ("x+y", 1),
                                      ("[x y]", 4), ("", 0), ("x)", 1)])
def test_parse_errors_report_position(text, pos):
    with pytest.raises(ParseError) as exc:
        parse_word(text)
    assert exc.value.position == pos


def test_arity_errors():
    with pytest.raises(ArityExceeded):
        parse_word("g5", max_arity=3)
    with pytest.raises(ArityMismatch):
        evaluate(parse_word("[x,y]"), [0], symmetric_group(3))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 5), st.sampled_from([-3, -2, -1, 1, 2, 3])), max_size=10))
def test_print_parse_round_trip(segs):
    w = Word.make(segs, 5)
    assert parse_word(str(w)) == Word.make(segs)
    assert all(a[0] != b[0] for a, b in zip(w.letters, w.letters[1:]))
    assert (w * w.inverse()).letters == ()


def test_reduced_words_order_and_count():
    words = list(reduced_words(2, 2))
    assert len(words) == 4 * 3
    assert [str(w) for w in words[:4]] == ["x^2", "x*y", "x*y^-1", "x^-2"]
    assert sum(1 for _ in reduced_words(2, 3)) == 4 * 3 * 3


# -- images ------------------------------------------------------------------------------

def _compose(p, q):
    return tuple(p[q[i]] for i in range(len(q)))


def _pinv(p):
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def _cycle_type(p):
    seen, out = set(), []
    for i in range(len(p)):
        if i in seen:
            continue
        n, j = 0, i
        while j not in seen:
            seen.add(j)
            j = p[j]
            n += 1
        out.append(n)
    return tuple(sorted(out))


def _label_cycle_type(label, n):
    cycles = [len(c.split()) for c in re.findall(r"\(([^)]*)\)", label) if c.strip()]
    return tuple(sorted(cycles + [1] * (n - sum(cycles))))


def _oracle_types(w, n):
    perms = list(itertools.permutations(range(n)))
    ident = tuple(range(n))
    out = set()
    for tup in itertools.product(perms, repeat=max(w.arity, 1)):
        acc = ident
        for l, e in w.letters:
            g = tup[l - 1] if e > 0 else _pinv(tup[l - 1])
            for _ in range(abs(e)):
                acc = _compose(acc, g)
        out.add(_cycle_type(acc))
    return out


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("text", ["x", "x^2", "x^3", "[x,y]", "x^2*y^2", "x*y*x^-1*y^2", "(x*y)^3"])
def test_images_match_python_permutation_oracle(n, text):
    G = symmetric_group(n)
    w = parse_word(text)
    img = word_image(w, G)
    assert {_label_cycle_type(G.labels[i], n) for i in img.elements} == _oracle_types(w, n)


def test_image_examples():
    assert word_image(parse_word("x^2"), cyclic_group(3)).elements == [0, 1, 2]
    S3 = symmetric_group(3)
    img = word_image(parse_word("[x,y]"), S3)
    assert sorted(S3.labels[i] for i in img.elements) == ["()", "(1 2 3)", "(1 3 2)"] and img.symmetric
    C9 = cyclic_group(9)
    img = word_image(parse_word("x^3"), C9)
    assert [C9.labels[i] for i in img.elements] == ["0", "3", "6"] and img.symmetric
    S4 = symmetric_group(4)
    img = word_image(parse_word("[x,y]"), S4)
    assert len(img.elements) == 12 and img.symmetric
    assert word_image(parse_word("1"), S4).elements == [S4.identity]


def test_evaluate_examples():
    S4 = symmetric_group(4)
    c = S4.labels.index("(1 2 3)")
    assert evaluate(parse_word("x"), [c], S4) == c
    assert evaluate(parse_word("x^3"), [c], S4) == S4.identity
    assert evaluate(parse_word("[x,y]"), [c, S4.mul[c, c]], S4) == S4.identity
    F = field_of_order(5)
    g = SquareMatrix(F, [[1, 1], [0, 1]])
    h = SquareMatrix(F, [[1, 0], [1, 1]])
    assert evaluate(parse_word("[x,y]"), [g, h]) == g @ h @ g.inverse() @ h.inverse()


def test_partitioned_and_parallel_images_agree():
    G = sl2(3)
    for text in ["[x,y]", "x^2*y^3", "x*y*x^-1*y^-2"]:
        w = parse_word(text)
        ref = word_image(w, G).elements
        assert word_image(w, G, parallelism=2).elements == ref
    from chirality_lab.wordmap import _all_tuples_image
    w = parse_word("[x,y]*z")
    assert _all_tuples_image(w, G, 3, block_rows=1000).tolist() == _all_tuples_image(w, G, 3).tolist()


def test_sampled_mode_never_asserts_asymmetry():
    G = symmetric_group(4)
    rep = word_image(parse_word("[x,y]"), G, mode="sampled", count=5, seed=1)
    assert rep.symmetric is None and G.identity in rep.elements
    full = word_image(parse_word("x"), G, mode="sampled", count=5000)
    assert full.symmetric is True and full.complete


def test_image_cap():
    with pytest.raises(SizeCapExceeded):
        word_image(parse_word("[x,y]*z"), symmetric_group(4), cap=1000)
    with pytest.raises(SizeCapExceeded):
        chirality_search(symmetric_group(4), 2, 3, cap=1000)


@pytest.mark.parametrize("G", [symmetric_group(3), symmetric_group(4), cyclic_group(9), sl2(3)],
                         ids=lambda G: G.name)
def test_image_properties_random_words(G):
    rng = np.random.default_rng(4)
    for _ in range(20):
        w = random_word(rng, 2, 5)
        img = word_image(w, G).elements
        assert word_image(w.inverse(), G).elements == sorted(int(G.inv[x]) for x in img)
        assert G.identity in img
        for x in range(len(G)):
            assert set(G.conj(x, np.array(img)).tolist()) == set(img)


def test_chirality_search_finds_nothing_on_real_and_abelian_groups():
    for G in (cyclic_group(5), cyclic_group(12), symmetric_group(4)):
        res = chirality_search(G, 4, 2)
        assert res.witness is None and res.verdict == "no_witness_within_budget" and res.inverse_identity_ok


# -- automorphisms -----------------------------------------------------------------------

def test_automorphism_invariance_examples():
    S4 = symmetric_group(4)
    w = parse_word("x^2*y")
    assert automorphism_invariance_check(w, S4, [inner_automorphism(S4, x) for x in range(24)])
    G = sl2(3)
    assert is_automorphism(G, transpose_inverse(G))
    assert automorphism_invariance_check(parse_word("x^2"), G, [transpose_inverse(G)])
    H = sl2(4)
    assert is_automorphism(H, entrywise_frobenius(H))
    assert automorphism_invariance_check(parse_word("[x,y]"), H, [entrywise_frobenius(H)])
    with pytest.raises(ValueError):
        automorphism_invariance_check(w, S4, [np.roll(np.arange(24), 1)])


def test_custom_table_validation():
    C4 = cyclic_group(4)
    G = GroupTable.from_table(C4.mul)
    assert G.identity == 0 and len(G) == 4
    bad = C4.mul.copy()
    bad[1, 1], bad[1, 2] = bad[1, 2], bad[1, 1]
    with pytest.raises(ValueError):
        GroupTable.from_table(bad)
    with pytest.raises(ValueError):
        GroupTable.from_table([[0, 1], [0, 1]])


def test_a4_elements_inverted_by_s4_conjugation():
    S4, A4 = symmetric_group(4), alternating_group(4)
    N = subgroup_indices(S4, A4)
    inv = induced_inversions(S4, N)
    assert sorted(inv) == sorted(N.tolist())
    for a, x in inv.items():
        assert S4.conj(x, a) == S4.inv[a]
    # inside A_4 alone only the identity and the double transpositions are real
    assert len(induced_inversions(A4, np.arange(12))) == 4
    with pytest.raises(ValueError):
        induced_inversions(S4, [S4.labels.index("(1 2)"), S4.identity])


# -- certificates ------------------------------------------------------------------------

@pytest.mark.parametrize("kind,q", [("SL", 2), ("SL", 3), ("SU", 3)])
def test_inversion_certificates_sampled(kind, q):
    G = enumerate_group(kind, q, 3)
    rng = np.random.default_rng(9)
    for i in rng.choice(len(G), size=min(200, len(G)), replace=False):
        cert = inversion_certificate(G.matrix(int(i)), kind)
        assert cert.verify()
        assert cert.apply(cert.element) == cert.element.inverse()


def test_identity_certificate():
    F = field_of_order(3)
    cert = inversion_certificate(SquareMatrix.identity(F), "SL")
    assert cert.conjugator == SquareMatrix.identity(F)


def test_symplectic_reality_check_sp4_3():
    F, J, elems, mult = extended_symplectic(3)
    assert len(elems) == 2 * 51840
    assert (mult == 1).sum() == 51840
    sp = np.nonzero(mult == 1)[0]
    rng = np.random.default_rng(2)
    for i in rng.choice(sp, size=30, replace=False):
        g = SquareMatrix(F, elems[i].tolist())
        cert = inversion_certificate(g, "Sp")
        assert cert.verify()
    with pytest.raises(NotInAmbientGroup):
        inversion_certificate(SquareMatrix.diag(F, [2, 1, 1, 1]), "Sp")


def test_certificate_membership_errors():
    F = field_of_order(7)
    with pytest.raises(NotInAmbientGroup):
        inversion_certificate(SquareMatrix.diag(F, [2, 1, 1]), "SL")
