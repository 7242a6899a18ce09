from __future__ import annotations

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from aprseq.attain import (
    Case,
    Form,
    canonical_matrix,
    check_char0,
    check_necessary,
    classify_no_A,
    construct_no_A,
    generalized_permutation_image,
    recognize_SN,
    scan_patterns,
)
from aprseq.exactfield import QQ, FieldSpec
from aprseq.minorseq import apr_sequence
from aprseq.symmatrix import SymMatrix, ak2, direct_sum, identity, ones, zeros

words = st.text(alphabet="ANS", min_size=1, max_size=9)


def test_scan_patterns():
    s = scan_patterns("SNS")
    assert s.has_NS and not s.has_NA
    s = scan_patterns("ANN")
    assert s.has_NN and s.contains_A
    s = scan_patterns("SSN")
    assert not (s.has_NA or s.has_NS or s.has_NN) and s.first_N == 3


@pytest.mark.parametrize("word, form, params", [
    ("SNSN", Form.SNS_alternating, {"blocks": 2, "trailing_N": 1}),
    ("SSNS", Form.NotNoA, {}),
    ("NNN", Form.AllN, {"n_count": 3}),
    ("SNNN", Form.SN_tail, {"trailing_N": 3}),
    ("SSSNN", Form.SS_then_N, {"s_count": 3, "trailing_N": 2}),
    ("N", Form.AllN, {"n_count": 1}),
    ("S", Form.NotNoA, {}),
    ("SNNS", Form.NotNoA, {}),
])
def test_classify_no_A(word, form, params):
    got = classify_no_A(word)
    assert got.form == form and got.params == params


def test_classify_no_A_rejects_A():
    with pytest.raises(ValueError):
        classify_no_A("SAN")


def test_necessary_examples():
    assert check_necessary("SNSNS").clause == "alternating"
    v = check_necessary("ANA")
    assert not v and "NA" in v.reason
    assert check_necessary("AAS").clause == "no-NA-NS"
    with pytest.raises(ValueError):
        check_necessary("A")


def test_char0_examples():
    assert check_char0("ASN")
    v = check_char0("S")
    assert not v and "length-1 S" in v.reason
    assert check_char0("A") and check_char0("N")
    assert not check_char0("SNNS")


@given(words.filter(lambda w: len(w) >= 2))
def test_char0_equals_necessary(w):
    assert bool(check_char0(w)) == bool(check_necessary(w))


@given(words)
def test_accepted_words_have_n_tail_after_nn(w):
    if check_char0(w) and "NN" in w:
        assert set(w[w.index("NN"):]) == {"N"}


@given(st.text(alphabet="SN", min_size=2, max_size=9))
def test_no_A_forms_pass_necessary(w):
    if classify_no_A(w).accepted:
        assert check_necessary(w)


def test_canonical_examples():
    B = canonical_matrix("J_plus_O", n=5, k=2)
    assert B == direct_sum(ones(3), zeros(2)) and apr_sequence(B).word == "SNNN"
    B = canonical_matrix("AK2_blocks", p=2, q=1)
    assert B.n == 5 and apr_sequence(B).word == "SNSN"
    B = canonical_matrix("J2_plus_I", n=4)
    assert B == direct_sum(ones(2), identity(2)) and apr_sequence(B).word == "SSS"
    with pytest.raises(ValueError):
        canonical_matrix("J_plus_O", n=3, k=3)
    with pytest.raises(ValueError):
        canonical_matrix("nope", n=3)
    with pytest.raises(ValueError):
        canonical_matrix("J_plus_O", n=3)


def test_construct_no_A_examples():
    assert construct_no_A("NNN") == zeros(4)
    assert construct_no_A("SNSNS") == direct_sum(ak2(), ak2(), ak2())
    assert apr_sequence(construct_no_A("SSN")).word == "SSN"
    with pytest.raises(ValueError):
        construct_no_A("SSNS")


@pytest.mark.parametrize("n", range(2, 8))
@pytest.mark.parametrize("field", [QQ, FieldSpec.gf(2), FieldSpec.gf(3)], ids=str)
def test_construct_no_A_recomputes(n, field):
    for letters in product("SN", repeat=n - 1):
        w = "".join(letters)
        if classify_no_A(w).accepted:
            B = construct_no_A(w, field)
            assert set(v for row in B.rows for v in row) <= {0, 1}
            assert apr_sequence(B).word == w


def test_recognize_examples():
    rep = recognize_SN(direct_sum(ones(3), zeros(1)))
    assert rep.case == Case.ScaledJ_plus_O and rep.k == 1
    B = SymMatrix([[0, 3, 0, 0], [3, 0, 0, 0], [0, 0, 0, -5], [0, 0, -5, 0]])
    rep = recognize_SN(B)
    assert (rep.case, rep.p, rep.q) == (Case.MatchingBlocks_Tpq, 2, 0)
    assert rep.verify(B)
    assert recognize_SN(identity(3)).case == Case.NoneCase


def test_recognize_L2_recovers_parameter():
    B = generalized_permutation_image(canonical_matrix("L2_plus_O", n=4, a=Fraction(5, 18)), [3, 1, 4, 2], [2, -3, 1, 7], 4)
    rep = recognize_SN(B)
    assert rep.case == Case.ScaledL2_plus_O and rep.a == Fraction(5, 18) and rep.verify(B)


def test_recognize_prefers_J_form_when_block_is_singular():
    # L_2(1) is J_2, so both the J-form and the L_2-form describe it
    rep = recognize_SN(canonical_matrix("L2_plus_O", n=3, a=1))
    assert rep.case == Case.ScaledJ_plus_O


def test_recognize_on_scrambled_families(rng):
    for _ in range(150):
        n = rng.randint(3, 8)
        fam = rng.choice(["J_plus_O", "L2_plus_O", "AK2_blocks"])
        if fam == "J_plus_O":
            B = canonical_matrix(fam, n=n, k=rng.randint(1, n - 2))
        elif fam == "L2_plus_O":
            B = canonical_matrix(fam, n=n, a=rng.randint(-4, 4))
        else:
            p = rng.randint(1, n // 2)
            B = canonical_matrix(fam, p=p, q=n - 2 * p)
        order = list(range(1, n + 1))
        rng.shuffle(order)
        scale = [rng.choice([1, -2, 3, Fraction(1, 2)]) for _ in range(n)]
        C = generalized_permutation_image(B, order, scale, rng.choice([1, -1, 5]))
        w = apr_sequence(C).word
        rep = recognize_SN(C)
        if w.startswith("SN"):
            assert rep.case != Case.NoneCase, C
            assert rep.verify(C) and apr_sequence(rep.canonical(QQ)).word == w
        else:
            assert rep.case == Case.NoneCase


def test_recognize_over_gf3():
    f = FieldSpec.gf(3)
    B = SymMatrix([[2, 2, 0], [2, 2, 0], [0, 0, 0]], f)
    rep = recognize_SN(B)
    assert rep.case == Case.ScaledJ_plus_O and rep.verify(B)
