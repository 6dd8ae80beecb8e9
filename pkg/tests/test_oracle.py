from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carrystat.carrydist import c_value, dist_for
from carrystat.dyadic import Dyadic
from carrystat.oracle import empirical_delta, exact_c, exact_delta, sum_of_digits


def test_sum_of_digits():
    assert sum_of_digits(0) == 0
    assert sum_of_digits(7) == 3
    assert sum_of_digits(1 << 10) == 1
    with pytest.raises(ValueError):
        sum_of_digits(-1)


def test_exact_delta_base_case():
    assert exact_delta(1, 1, 2) == Dyadic(1, 1)
    assert exact_delta(1, 0, 2) == Dyadic(1, 2)
    assert exact_delta(1, -1, 2) == Dyadic(1, 3)


def test_exact_c():
    assert exact_c(1, 2) == Dyadic(3, 2)
    assert exact_c(0, 1) == Dyadic(1)
    assert exact_c(3, 3) == c_value(dist_for(3))


def test_modulus_must_exceed_t():
    with pytest.raises(ValueError):
        exact_delta(4, 0, 2)
    with pytest.raises(ValueError):
        exact_delta(-1, 0, 3)


def test_empirical():
    e = empirical_delta(1, 1, 1 << 10)
    assert abs(e.as_fraction() - Fraction(1, 2)) <= Fraction(2, 1 << 10)
    assert empirical_delta(0, 0, 1 << 4) == Dyadic(1)
    assert empirical_delta(3, sum_of_digits(3), 1 << 12) > Dyadic(0)
    with pytest.raises(ValueError):
        empirical_delta(1, 0, 1000)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 255), st.integers(-12, 10), st.integers(9, 14))
def test_modulus_independence(t, j, m):
    assert exact_delta(t, j, m) == exact_delta(t, j, t.bit_length() + 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 255))
def test_total_mass(t):
    lo = -40
    head = sum((exact_delta(t, j).as_fraction() for j in range(lo, sum_of_digits(t) + 1)), Fraction(0))
    # below lo the density is geometric, so the remainder is delta(lo) itself
    remainder = exact_delta(t, lo).as_fraction()
    assert head <= 1
    assert 1 - head <= remainder


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 63), st.integers(-6, 6), st.integers(10, 14))
def test_empirical_converges(t, j, m):
    dev = abs(empirical_delta(t, j, 1 << m).as_fraction() - exact_delta(t, j).as_fraction())
    assert dev <= Fraction(t + 64, 1 << m)
