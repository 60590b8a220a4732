from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given

from loopalg.linalg.scalars import (
    FieldMismatch,
    FieldSpec,
    InvalidInverse,
    Residue,
    ScalarError,
    ScalarParseError,
    is_prime,
    scalar_arith,
    sign,
)

PRIMES = [2, 3, 5, 7, 11, 101]

fractions = st.fractions(max_denominator=1000)


@st.composite
def residues(draw, p=None):
    p = p if p is not None else draw(st.sampled_from(PRIMES))
    return Residue(draw(st.integers()), p)


def test_rational_arithmetic():
    q = FieldSpec.rationals()
    assert scalar_arith(q(Fraction(1, 2)), q(Fraction(1, 3)), "add") == Fraction(5, 6)
    assert scalar_arith(q(Fraction(2, 3)), q(Fraction(3, 4)), "mul") == Fraction(1, 2)
    assert scalar_arith(q(Fraction(2, 3)), None, "inv") == Fraction(3, 2)
    assert scalar_arith(q(7), None, "neg") == -7


def test_prime_field_arithmetic():
    f5 = FieldSpec.prime(5)
    assert scalar_arith(f5(3), f5(4), "mul") == f5(2)
    assert scalar_arith(f5(3), f5(4), "add") == f5(2)
    assert scalar_arith(f5(2), None, "inv") == f5(3)
    assert scalar_arith(f5(1), None, "neg") == f5(4)


def test_canonical_residues():
    f7 = FieldSpec.prime(7)
    assert f7(-1).value == 6
    assert f7(Fraction(1, 2)) == f7(4)
    assert f7(10) == 3
    assert str(f7(-1)) == "6"


def test_inverse_of_zero():
    with pytest.raises(InvalidInverse):
        scalar_arith(FieldSpec.prime(3)(0), None, "inv")
    with pytest.raises(InvalidInverse):
        FieldSpec.rationals().inv(Fraction(0))
    with pytest.raises(InvalidInverse):
        FieldSpec.prime(3)(Fraction(1, 3))


def test_mixed_fields():
    with pytest.raises(FieldMismatch):
        scalar_arith(Residue(1, 3), Residue(1, 5), "add")
    with pytest.raises(FieldMismatch):
        scalar_arith(Fraction(1), Residue(1, 5), "mul")
    with pytest.raises(FieldMismatch):
        FieldSpec.prime(3)(Residue(1, 5))


def test_field_spec():
    assert FieldSpec.rationals().characteristic == 0
    assert FieldSpec.prime(11).characteristic == 11
    assert str(FieldSpec.prime(11)) == "F11"
    with pytest.raises(ScalarError):
        FieldSpec.prime(9)
    with pytest.raises(ScalarError):
        FieldSpec("rationals", 3)


def test_parse_and_serialize():
    q = FieldSpec.rationals()
    assert q.parse(" -3/6 ") == Fraction(-1, 2)
    assert q.serialize(Fraction(-1, 2)) == "-1/2"
    assert q.serialize(Fraction(4)) == "4"
    assert FieldSpec.prime(5).serialize(FieldSpec.prime(5)("3/2")) == 4
    with pytest.raises(ScalarParseError):
        q.parse("three")


@pytest.mark.parametrize("p, expected", [(1, False), (2, True), (9, False), (97, True), (91, False)])
def test_is_prime(p, expected):
    assert is_prime(p) is expected


def test_sign():
    assert [sign(n) for n in (-3, -2, 0, 1, 4)] == [-1, 1, 1, -1, 1]


@given(fractions, fractions, fractions)
def test_rational_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a + (-a) == 0
    if a:
        assert scalar_arith(a, None, "inv") * a == 1


@given(st.sampled_from(PRIMES).flatmap(lambda p: st.tuples(residues(p), residues(p), residues(p))))
def test_prime_field_axioms(elements):
    a, b, c = elements
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a + (-a) == 0
    assert 0 <= (a * b).value < a.p
    if a:
        assert a * a.inverse() == 1
