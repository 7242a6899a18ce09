from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from aprseq.exactfield import (
    QQ,
    FieldError,
    FieldSpec,
    Scalar,
    parse_scalar,
    sample_scalar,
    scalar_arith,
)

GF7 = FieldSpec.gf(7)


def test_rational_addition():
    assert QQ.scalar(Fraction(1, 2)) + QQ.scalar(Fraction(1, 3)) == Fraction(5, 6)


def test_gf_inverse():
    assert scalar_arith(GF7.scalar(3), None, "inv") == 5


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        QQ.scalar(0).inverse()
    with pytest.raises(ZeroDivisionError):
        GF7.scalar(0).inverse()


def test_parse_examples():
    assert parse_scalar("-4/6", QQ) == Fraction(-2, 3)
    assert parse_scalar("9", GF7) == 2
    with pytest.raises(ValueError):
        parse_scalar("1/2", GF7)
    with pytest.raises(ValueError):
        parse_scalar("3/0", QQ)
    with pytest.raises(ValueError):
        parse_scalar("x", QQ)


def test_field_parse_and_validation():
    assert FieldSpec.parse("rational") == QQ
    assert FieldSpec.parse("char0") == QQ
    assert FieldSpec.parse("gf:5") == FieldSpec.gf(5)
    assert FieldSpec.parse("GF(3)") == FieldSpec.gf(3)
    assert FieldSpec.parse("gf 2") == FieldSpec.gf(2)
    assert str(FieldSpec.gf(5)) == "gf 5"
    with pytest.raises(FieldError):
        FieldSpec.gf(4)
    with pytest.raises(FieldError):
        FieldSpec.parse("reals")
    assert FieldSpec.gf(3).characteristic == 3 and QQ.characteristic == 0


def test_mixed_fields_rejected():
    with pytest.raises(FieldError):
        GF7.scalar(1) + FieldSpec.gf(5).scalar(1)
    with pytest.raises(FieldError):
        scalar_arith(GF7.scalar(1), QQ.scalar(1), "mul")


def test_scalar_canonical_form():
    assert Scalar(GF7, 10).value == 3
    assert Scalar(QQ, 2).value == Fraction(2)
    assert hash(Scalar(GF7, 10)) == hash(Scalar(GF7, 3))
    assert str(Scalar(QQ, Fraction(-6, 4))) == "-3/2"


def test_sampling_contract():
    a = sample_scalar(random.Random(42), QQ, 100)
    b = sample_scalar(random.Random(42), QQ, 100)
    assert a == b and -100 <= a.value <= 100 and a.value.denominator == 1
    r = random.Random(0)
    assert {sample_scalar(r, FieldSpec.gf(2)).value for _ in range(50)} <= {0, 1}


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50), st.sampled_from([2, 3, 5, 7, 101]))
def test_prime_field_axioms(a, b, c, p):
    f = FieldSpec.gf(p)
    x, y, z = f.scalar(a), f.scalar(b), f.scalar(c)
    assert x * (y + z) == x * y + x * z
    assert (x - y) + y == x
    if not y.is_zero():
        assert (x / y) * y == x
        assert y * y.inverse() == 1


@given(st.fractions(max_denominator=20), st.fractions(max_denominator=20))
def test_rationals_match_fraction(a, b):
    x, y = QQ.scalar(a), QQ.scalar(b)
    assert (x + y).value == a + b
    assert (x * y).value == a * b
    if b:
        assert (x / y).value == a / b
