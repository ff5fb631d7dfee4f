"""
Tests for the rational, profile and random-stream helpers.
"""
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from app.utils.profiles import (
    decode_profile,
    encode_profile,
    leak_sets,
    mask_of,
    members,
    prefix_length,
    prefix_profile,
    submasks,
)
from app.utils.rationals import approx, binomial, describe, format_rational, parse_rational
from app.utils.rng import generator


# === Rationals ===

def test_parse_rational_forms():
    """Strings, ints and Fractions are accepted."""
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational(" -2 / 6 ") == Fraction(-1, 3)
    assert parse_rational("5") == Fraction(5)
    assert parse_rational(7) == Fraction(7)
    assert parse_rational(Fraction(1, 9)) == Fraction(1, 9)


@pytest.mark.parametrize("value", [0.5, "0.5", "1/0", "a/b", True, None, "1//2"])
def test_parse_rational_refuses_inexact(value):
    with pytest.raises(ValueError):
        parse_rational(value)


def test_format_and_describe():
    assert format_rational(Fraction(6, 4)) == "3/2"
    assert format_rational(Fraction(4, 2)) == "2"
    assert approx(Fraction(1, 3)) == "0.333333"
    assert approx(Fraction(-1, 8), 2) == "-0.12"
    assert describe(Fraction(9, 4)) == "9/4 (~2.250000)"


@given(st.fractions())
def test_format_parse_inverse(value):
    assert parse_rational(format_rational(value)) == value


def test_binomial_outside_range_is_zero():
    assert binomial(5, 2) == 10
    assert binomial(3, 4) == 0
    assert binomial(3, -1) == 0


# === Profiles ===

def test_mask_conventions():
    """Bit i-1 of a mask is receiver i."""
    assert mask_of((1, 0, 1)) == 0b101
    assert list(members(0b101)) == [0, 2]
    assert list(submasks(0b11)) == [0b11, 0b10, 0b01, 0]


def test_prefix_profiles():
    assert prefix_profile(4, 2) == (1, 1, 0, 0)
    assert prefix_length((1, 1, 0, 0)) == 2
    assert prefix_length((0, 0, 0)) == 0
    assert prefix_length((1, 0, 1)) == -1


def test_leak_sets_order():
    """By increasing size, then lexicographic."""
    assert list(leak_sets([1, 2, 3], 2)) == [(), (1,), (2,), (3,), (1, 2), (1, 3), (2, 3)]


def test_profile_text():
    alphabets = [("+", "-"), ("X", "Y"), ("+", "-", "0")]
    assert encode_profile((1, 0, 2), alphabets) == "-X0"
    assert decode_profile("-X0", alphabets) == (1, 0, 2)
    with pytest.raises(ValueError):
        decode_profile("-Z0", alphabets)
    with pytest.raises(ValueError):
        decode_profile("-X", alphabets)


# === Random streams ===

def test_generator_is_a_function_of_seed_and_index():
    first = generator(7, 3).integers(0, 10 ** 9, size=4).tolist()
    again = generator(7, 3).integers(0, 10 ** 9, size=4).tolist()
    other = generator(7, 4).integers(0, 10 ** 9, size=4).tolist()
    assert first == again
    assert first != other


def test_generator_refuses_negative_seed():
    with pytest.raises(ValueError):
        generator(-1)
