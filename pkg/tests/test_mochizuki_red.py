"""Reducible-fiber stability, exotic weights, strata and defects."""

import itertools
import random
from fractions import Fraction

import pytest

from hitchin_strata.core import FilteredClass, degree
from hitchin_strata.mochizuki_red import (
    STABLE,
    STRICTLY_SEMISTABLE,
    UNSTABLE,
    ClosedFormInapplicable,
    ReducibleDatum,
    ReducibleError,
    ReducibleProfile,
    classify,
    closed_form_c,
    enumerate_reducible_strata,
    exotic,
    genus_verdict,
    limit_defect,
    weight_constant,
)


def random_stable(rng, max_genus=6):
    """Random (profile, stable datum); stability needs deg D >= 2."""
    while True:
        g = rng.randint(2, max_genus)
        remaining = 2 * g - 2
        mults = []
        while remaining:
            m = rng.randint(1, remaining)
            mults.append(m)
            remaining -= m
        profile = ReducibleProfile(g, tuple(mults))
        coeffs = tuple(rng.randint(0, m) for m in mults)
        if sum(coeffs) < 2:
            continue
        d_plus = rng.randint(-sum(coeffs) + 1, -1)
        return profile, ReducibleDatum(coeffs, d_plus)


def test_profile_validation():
    with pytest.raises(ReducibleError):
        ReducibleProfile(1, ())
    with pytest.raises(ReducibleError):
        ReducibleProfile(2, (1,))
    with pytest.raises(ReducibleError):
        ReducibleProfile(2, (2, 0))
    ReducibleProfile(3, (2, 1, 1))


def test_classification_window():
    d = ReducibleDatum((2, 1), -1)
    assert classify(d).tag == STABLE
    assert classify(ReducibleDatum((2, 1), -3)).tag == STRICTLY_SEMISTABLE
    assert classify(ReducibleDatum((2, 1), 0)).tag == STRICTLY_SEMISTABLE
    assert classify(ReducibleDatum((2, 1), 1)).tag == UNSTABLE
    assert classify(ReducibleDatum((2, 1), -4)).tag == UNSTABLE
    pair = classify(ReducibleDatum((2, 1), 0)).polystable_pair
    assert pair == (FilteredClass(0), FilteredClass(0))


def test_exotic_iff_degrees_differ():
    assert exotic(ReducibleDatum((2, 1), -1))      # d_- = -2
    assert not exotic(ReducibleDatum((2, 2), -2))  # d_- = -2
    with pytest.raises(ReducibleError):
        exotic(ReducibleDatum((2, 1), 0))


def test_random_stable_balance_identities():
    rng = random.Random(42)
    for _ in range(300):
        profile, datum = random_stable(rng)
        sol = weight_constant(profile, datum)
        # Both summands of the limit pair have parabolic degree zero.
        assert degree(sol.pair[0]) == 0
        assert degree(sol.pair[1]) == 0
        # Weights stay inside [0, l_p] and split l_p between the sides.
        for p, l in zip(profile.points(), datum.coeffs):
            assert 0 <= sol.chi_plus[p] <= l
            assert sol.chi_plus[p] + sol.chi_minus[p] == l
        assert sol.c >= 0
        assert (sol.c != 0) == exotic(datum)


def test_swap_symmetry():
    rng = random.Random(43)
    for _ in range(100):
        profile, datum = random_stable(rng)
        mirror = ReducibleDatum(datum.coeffs, datum.d_minus)
        a = weight_constant(profile, datum)
        b = weight_constant(profile, mirror)
        assert a.c == b.c
        assert a.chi_plus == b.chi_minus and a.chi_minus == b.chi_plus
        assert a.pair == (b.pair[1], b.pair[0])


def test_closed_form_agreement():
    rng = random.Random(44)
    hits = 0
    for _ in range(200):
        profile, datum = random_stable(rng)
        sol = weight_constant(profile, datum)
        try:
            c = closed_form_c(profile, datum)
        except ClosedFormInapplicable:
            continue
        hits += 1
        assert c == sol.c
    assert hits > 50  # the closed form applies on a healthy fraction


def test_simple_zeros_weights():
    # All zeros simple: the weight at every support point is -d_+/deg D
    # (in the d_+ <= d_- convention).
    for g in (3, 4, 5):
        profile = ReducibleProfile(g, (1,) * (2 * g - 2))
        for deg_d in range(2, 2 * g - 1):
            coeffs = (1,) * deg_d + (0,) * (2 * g - 2 - deg_d)
            for d_plus in range(-deg_d + 1, 0):
                datum = ReducibleDatum(coeffs, d_plus)
                sol = weight_constant(profile, datum)
                lo = min(d_plus, datum.d_minus)
                for i in range(deg_d):
                    assert sol.chi[profile.point(i)] == Fraction(-lo, deg_d)
                if d_plus <= datum.d_minus:
                    for i in range(deg_d):
                        assert sol.chi_plus[profile.point(i)] == Fraction(-d_plus, deg_d)


def test_genus2_example():
    profile = ReducibleProfile(2, (2,))
    datum = ReducibleDatum((2,), -1)
    sol = weight_constant(profile, datum)
    p = profile.point(0)
    assert sol.c == 0
    assert sol.chi_plus[p] == 1 and sol.chi_minus[p] == 1
    assert sol.pair == (FilteredClass(0), FilteredClass(0))
    assert not exotic(datum)


def test_strata_enumeration():
    profile = ReducibleProfile(2, (1, 1))
    strata = enumerate_reducible_strata(profile)
    assert len(strata) == 8  # sum over D <= Lambda' of (deg D + 1)
    for s in strata:
        assert -s.deg_D <= s.m <= 0
        assert s.partner_m == -s.deg_D - s.m
        assert s.double_cover == (2 * s.m == -s.deg_D)
        assert s.fiber_dim == max(s.deg_D - 1, 0)
        assert s.polystable_point == (s.deg_D == 0)
    # The partner involution maps the stratum list to itself.
    keys = {(s.coeffs, s.m) for s in strata}
    assert {(s.coeffs, s.partner_m) for s in strata} == keys


def test_limit_defect_same_stratum_trivial():
    profile = ReducibleProfile(3, (2, 1, 1))
    datum = ReducibleDatum((2, 1, 0), -1)
    report = limit_defect(profile, datum, (2, 1, 0))
    assert not report.mismatch
    assert report.plus_factor.is_trivial() and report.minus_factor.is_trivial()
    assert report.family == report.limit


def test_limit_defect_genus2_boundary_crossing():
    # g = 2, two simple zeros: stable interior, strictly semistable boundary.
    profile = ReducibleProfile(2, (1, 1))
    datum = ReducibleDatum((1, 1), -1)
    report = limit_defect(profile, datum, (1, 0))
    assert report.mismatch
    p0, p1 = profile.points()
    expected = FilteredClass(-1, {p0: Fraction(1, 2), p1: Fraction(1, 2)})
    assert report.plus_factor == expected
    assert report.minus_factor == expected


def test_limit_defect_validation():
    profile = ReducibleProfile(2, (1, 1))
    with pytest.raises(ReducibleError):
        limit_defect(profile, ReducibleDatum((1, 1), -1), (1, 2))
    with pytest.raises(ReducibleError):
        limit_defect(profile, ReducibleDatum((1, 0), -1), (0, 0))  # limit unstable


def test_genus_verdict():
    assert genus_verdict(ReducibleProfile(2, (2,))).continuous_on_stable
    assert genus_verdict(ReducibleProfile(2, (1, 1))).continuous_on_stable
    for mults in ((2, 2), (3, 1), (1, 1, 1, 1)):
        v = genus_verdict(ReducibleProfile(3, mults))
        assert not v.continuous_on_stable
        assert v.defect is not None and v.defect.mismatch
        assert not (
            v.defect.plus_factor.is_trivial() and v.defect.minus_factor.is_trivial()
        )
    v = genus_verdict(ReducibleProfile(5, (3, 3, 1, 1)))
    assert not v.continuous_on_stable and v.defect.mismatch


def test_genus_verdict_single_zero_degenerates():
    # A one-form with a single zero has no constant-degree crossing with a
    # nontrivial defect: the weight shift at the unique support point is
    # absorbed into the underlying-bundle twist.
    with pytest.raises(ReducibleError, match="single zero"):
        genus_verdict(ReducibleProfile(3, (4,)))


def test_datum_bounds_checked():
    profile = ReducibleProfile(2, (2,))
    with pytest.raises(ReducibleError):
        weight_constant(profile, ReducibleDatum((3,), -1))
    with pytest.raises(ReducibleError):
        weight_constant(profile, ReducibleDatum((2,), -2))  # semistable


def test_all_stable_data_small_genus_exact():
    # Exhaustive over a small profile: solver always validates f(c) = 0
    # and matches the closed form whenever it applies.
    profile = ReducibleProfile(4, (3, 2, 1))
    for coeffs in itertools.product(range(4), range(3), range(2)):
        deg_d = sum(coeffs)
        if deg_d < 2:
            continue
        for d_plus in range(-deg_d + 1, 0):
            datum = ReducibleDatum(coeffs, d_plus)
            sol = weight_constant(profile, datum)
            assert degree(sol.pair[0]) == 0 and degree(sol.pair[1]) == 0
            try:
                assert closed_form_c(profile, datum) == sol.c
            except ClosedFormInapplicable:
                pass
