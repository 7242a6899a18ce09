from __future__ import annotations

import json
from itertools import product

import pytest

from aprseq.attain import classify_no_A
from aprseq.census import (
    CensusBudgetError,
    CensusViolation,
    apr_census,
    census_cross_check,
    decode_word,
    encode_word,
    enumerate_symmetric,
    matrix_at,
    merge_partials,
    triple_violations,
)
from aprseq.exactfield import FieldSpec
from aprseq.minorseq import apr_sequence, epr_sequence, qpr_sequence

GF2, GF3, GF5 = FieldSpec.gf(2), FieldSpec.gf(3), FieldSpec.gf(5)


@pytest.mark.parametrize("field, n, count", [(GF2, 2, 8), (GF2, 4, 1024), (GF3, 2, 27)])
def test_enumeration_counts(field, n, count):
    assert sum(1 for _ in enumerate_symmetric(field, n)) == count


def test_odometer_order():
    mats = list(enumerate_symmetric(GF3, 2))
    assert all(matrix_at(GF3, 2, i) == B for i, B in enumerate(mats))
    # the (1,1) entry turns fastest
    assert [m.rows[0][0] for m in mats[:4]] == [0, 1, 2, 0]
    assert len(set(mats)) == len(mats)


def test_gf3_n4_count():
    assert apr_census(GF3, 4).matrix_count == 59049


def test_budget(monkeypatch):
    with pytest.raises(CensusBudgetError) as err:
        apr_census(GF2, 7)
    assert err.value.required == 2 ** 28
    monkeypatch.setenv("APRSEQ_CENSUS_BUDGET", "10")
    with pytest.raises(CensusBudgetError):
        list(enumerate_symmetric(GF2, 3))
    with pytest.raises(ValueError):
        apr_census(FieldSpec.rationals(), 2)


def test_word_codes():
    for w in ["A", "SNS", "NNNA", "SSAN"]:
        assert decode_word(encode_word(w), len(w)) == w


def test_gf2_small_words():
    assert apr_census(GF2, 2).words() == {"A", "N"}
    r = apr_census(GF2, 4)
    assert {w for w in r.words() if w.startswith("A")} == {"AAA", "ASS", "ASN", "ANN"}
    assert not {"AAN", "AAS", "ASA"} & r.words()


@pytest.mark.parametrize("field, n", [(GF2, 2), (GF2, 3), (GF2, 4), (GF3, 2), (GF3, 3), (GF5, 2)])
def test_engines_agree(field, n):
    a = apr_census(field, n)
    b = apr_census(field, n, engine="scalar")
    assert a.to_json() == b.to_json()


def test_witnesses_recompute():
    r = apr_census(GF3, 3)
    for w, entry in r.sequences.items():
        B = matrix_at(GF3, 3, entry["witness_index"])
        assert apr_sequence(B).word == w
    for w in r.epr_sequences:
        assert epr_sequence(r.witness(w, "epr")).word == w
    for w in r.qpr_sequences:
        assert qpr_sequence(r.witness(w, "qpr")).word == w


def test_counts_add_up():
    r = apr_census(GF2, 4)
    assert r.visited == r.matrix_count == sum(e["count"] for e in r.sequences.values())


def test_orbit_knob_keeps_word_set():
    full = apr_census(GF2, 4)
    reduced = apr_census(GF2, 4, engine="scalar", orbit_minimum=True)
    assert reduced.words() == full.words() and reduced.visited < full.visited
    with pytest.raises(ValueError):
        apr_census(GF2, 3, orbit_minimum=True)


def test_partition_independence():
    assert apr_census(GF2, 4).to_json() == apr_census(GF2, 4, workers=3).to_json()


def test_merge_is_order_free():
    a = {1: [2, 5], 2: [1, 9]}
    b = {1: [3, 4], 3: [1, 0]}
    assert merge_partials([a, b]) == merge_partials([b, a]) == {1: [5, 4], 2: [1, 9], 3: [1, 0]}


@pytest.mark.parametrize("field, n", [(GF2, 4), (GF2, 5), (GF3, 4)])
def test_cross_check_passes(field, n):
    r = census_cross_check(field, n)
    assert r.ok
    assert "SSNS" not in r.words()


def test_no_A_words_match_forms_both_ways():
    r = apr_census(GF2, 5)
    for letters in product("SN", repeat=4):
        w = "".join(letters)
        assert (w in r.words()) == classify_no_A(w).accepted


def test_cross_check_catches_a_bad_report():
    r = apr_census(GF2, 4)
    r.sequences.pop("SNS")
    with pytest.raises(CensusViolation, match="SNS"):
        census_cross_check(GF2, 4, r)
    r = apr_census(GF2, 4)
    r.sequences["SSNS"] = {"count": 1, "witness_index": 0}
    with pytest.raises(CensusViolation):
        census_cross_check(GF2, 4, r)


def test_triple_checks_flag_bad_words():
    assert triple_violations("SNS", "NSNA", "SSSA", 4) == []
    assert any("NA" in m for m in triple_violations("NAN", "NNNN", "NSNN", 4))
    assert any("qpr letter" in m for m in triple_violations("SNS", "NSNA", "SSNA", 4))
    assert triple_violations("S", "AA", "SA", 2)


def test_json_schema():
    data = json.loads(json.dumps(apr_census(GF2, 3).to_json()))
    assert set(data) == {"field", "n", "matrix_count", "visited", "apr", "epr", "qpr", "violations"}
    assert data["field"] == "gf 2" and data["matrix_count"] == 64
    entry = data["apr"]["AN"]
    assert set(entry) == {"count", "witness_index", "witness"}
    assert entry["witness"][0] == "field gf 2"
