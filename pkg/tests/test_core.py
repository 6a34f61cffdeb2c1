"""Unit and property tests for the exact filtered-class arithmetic."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hitchin_strata.core import (
    Divisor,
    FilteredClass,
    MarkedPoint,
    WeightMap,
    degree,
    even_pair,
    normalize,
    odd_point,
    tensor,
)

P = MarkedPoint("p")
Q = MarkedPoint("q")
POINTS = [MarkedPoint(f"x{i}") for i in range(4)]

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=12)
weight_maps = st.dictionaries(st.sampled_from(POINTS), rationals, max_size=4).map(
    WeightMap
)
divisors = st.dictionaries(
    st.sampled_from(POINTS), st.integers(-5, 5), max_size=4
).map(Divisor)
filtered = st.builds(
    normalize, st.integers(-10, 10), weight_maps
)


def test_marked_point_partner_structure():
    plus, minus = even_pair("e0")
    assert plus.partner == minus.id and minus.partner == plus.id
    assert odd_point("o0").partner is None
    with pytest.raises(ValueError):
        MarkedPoint("bad", "even-pair-plus")  # partner required
    with pytest.raises(ValueError):
        MarkedPoint("bad", "plain", "x")  # partner forbidden


def test_normalize_examples():
    f = normalize(0, WeightMap({P: Fraction(3, 2)}))
    assert f == FilteredClass(1, {P: Fraction(1, 2)})
    assert normalize(5, WeightMap()) == FilteredClass(5)
    a = normalize(0, WeightMap({P: Fraction(1)}))
    b = normalize(0, WeightMap({P: Fraction(1, 2), Q: Fraction(1, 2)}))
    assert a != b


def test_tensor_examples():
    half = normalize(0, WeightMap({P: Fraction(1, 2)}))
    assert tensor(half, half) == FilteredClass(1)
    f = normalize(2, WeightMap({P: Fraction(1, 3), Q: Fraction(3, 4)}))
    assert tensor(f, FilteredClass(0)) == f
    a = normalize(1, WeightMap({P: Fraction(1, 3)}))
    b = normalize(-1, WeightMap({P: Fraction(1, 3)}))
    assert tensor(a, b) == FilteredClass(0, {P: Fraction(2, 3)})


def test_degree_examples():
    f = FilteredClass(-1, {P: Fraction(1, 2), Q: Fraction(1, 2)})
    assert degree(f) == 0
    assert degree(FilteredClass(0)) == 0
    g = FilteredClass(2, {P: Fraction(1, 3), Q: Fraction(1, 4)})
    assert degree(g) == Fraction(31, 12)


def test_jump_range_enforced():
    with pytest.raises(ValueError):
        FilteredClass(0, {P: Fraction(3, 2)})
    with pytest.raises(ValueError):
        FilteredClass(0, {P: Fraction(-1, 2)})


@given(st.integers(-10, 10), weight_maps)
def test_normalize_idempotent(d, chi):
    f = normalize(d, chi)
    again = normalize(f.underlying_degree, WeightMap(f.jumps))
    assert again == f
    assert degree(f) == d + chi.total()


@given(filtered, filtered)
def test_tensor_degree_additive(a, b):
    assert degree(tensor(a, b)) == degree(a) + degree(b)


@given(st.integers(-10, 10), weight_maps, divisors)
def test_presentation_invariance(d, chi, C):
    # Twisting by an integral divisor and shifting weights is invisible.
    assert normalize(d, chi) == normalize(d - C.degree(), chi + C.weight_map())


@given(filtered, filtered, filtered)
def test_tensor_associative_commutative(a, b, c):
    assert tensor(a, b) == tensor(b, a)
    assert tensor(tensor(a, b), c) == tensor(a, tensor(b, c))


def test_divisor_arithmetic():
    d = Divisor({P: 2, Q: -1})
    e = Divisor({Q: 1})
    assert (d + e).degree() == 2
    assert not d.is_effective()
    assert (d + e).is_effective()
    assert d <= d + e
    assert not (d + e <= e)
    assert d - d == Divisor()
    assert d.weight_map()[P] == 2
