from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonlocal_lp.rational import RationalFormatError, as_rational, format_rational, parse_rational


@pytest.mark.parametrize("text,value", [
    ("0", Fraction(0)),
    ("7", Fraction(7)),
    ("-3/4", Fraction(-3, 4)),
    ("1/4", Fraction(1, 4)),
    ("1000000000000000000000000000001/3", Fraction(10**30 + 1, 3)),
])
def test_parse(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["2/4", "3/1", "1/0", "-0", "01", "1/-2", "0.5", "", "1 /2", "+1"])
def test_non_canonical_rejected(text):
    with pytest.raises(RationalFormatError):
        parse_rational(text)


@given(st.fractions())
def test_round_trip(x):
    assert parse_rational(format_rational(x)) == x


def test_as_rational_refuses_floats_and_bools():
    with pytest.raises(TypeError):
        as_rational(0.25)
    with pytest.raises(TypeError):
        as_rational(True)
    assert as_rational("5/6") == Fraction(5, 6)
