import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carrystat.bounds import chebyshev_check, chebyshev_shift
from carrystat.carrydist import (
    blocks_count,
    c_value,
    delta_at,
    dist_for,
    mass_at_least,
    ones_blocks,
    pair_append_bit,
    pair_initial,
    raw_moment,
    reverse_binary,
)
from carrystat.dyadic import Dyadic
from carrystat.oracle import exact_delta, sum_of_digits

MIN_T = 0b111101111011110111101111011111
MIN_CT = Dyadic(18169025645289, 45)


def test_initial_pair():
    p = pair_initial()
    assert p.lo.support == {0: Dyadic(1)}
    assert p.lo.tail == 0
    assert delta_at(p.hi, 1) == Dyadic(1, 1)
    assert delta_at(p.hi, 0) == Dyadic(1, 2)
    assert delta_at(p.hi, -1) == Dyadic(1, 3)
    assert p.hi.mass() == Dyadic(1)


def test_append_bit_examples():
    p = pair_initial()
    zero = pair_append_bit(p, 0)
    assert zero.lo == dist_for(0)
    assert zero.hi == dist_for(1)
    one = pair_append_bit(p, 1)
    assert one.lo == dist_for(1)
    assert one.hi == dist_for(2)
    for q in (zero, one):
        assert q.lo.mass() == Dyadic(1) and q.hi.mass() == Dyadic(1)


def test_dist_for_examples():
    assert dist_for(0).support == {0: Dyadic(1)}
    assert dist_for(2) == dist_for(1)
    assert dist_for(MIN_T) == dist_for(reverse_binary(MIN_T))


def test_c_value_examples():
    assert c_value(dist_for(1)) == Dyadic(3, 2)
    assert c_value(dist_for(0)) == Dyadic(1)
    assert c_value(dist_for(MIN_T)) == MIN_CT


def test_delta_at_examples():
    d = dist_for(1)
    assert delta_at(d, 1) == Dyadic(1, 1)
    assert delta_at(d, -3) == Dyadic(1, 5)
    assert delta_at(d, 2) == Dyadic(0)
    assert delta_at(d, -200) == Dyadic(1, 202)


def test_raw_moment_examples():
    d = dist_for(1)
    assert raw_moment(d, 0) == Dyadic(1)
    assert raw_moment(d, 1) == Dyadic(0)
    assert raw_moment(d, 2) == Dyadic(2)
    with pytest.raises(ValueError):
        raw_moment(d, -1)


def test_raw_moment_against_truncated_sum():
    # Tail below -80 contributes less than 2**-60 to the second moment.
    d = dist_for(0b1011)
    approx = sum(delta_at(d, j).as_fraction() * j * j for j in range(-80, d.j_max + 1))
    assert abs(raw_moment(d, 2).as_fraction() - approx) < 2.0**-60


def test_blocks_examples():
    assert blocks_count(0) == 0
    assert blocks_count(1) == 1
    assert blocks_count(13) == 3
    assert blocks_count(0b1100) == 1
    assert ones_blocks(0b1011001) == 3
    with pytest.raises(ValueError):
        blocks_count(-1)


def test_reverse_examples():
    assert reverse_binary(1) == 1
    assert reverse_binary(6) == 3
    # not a palindrome: the reversal is a second minimizer
    assert reverse_binary(MIN_T) == 0b111110111101111011110111101111
    assert reverse_binary(reverse_binary(MIN_T)) == MIN_T
    assert c_value(dist_for(reverse_binary(MIN_T))) == MIN_CT
    with pytest.raises(ValueError):
        reverse_binary(0)


def test_prefix_identity_exhaustive():
    for t in range(1 << 12):
        assert dist_for(2 * t) == dist_for(t)


def test_oracle_equivalence_exhaustive():
    for t in range(256):
        d = dist_for(t)
        for j in range(-12, 11):
            assert delta_at(d, j) == exact_delta(t, j)


def test_mass_at_least_matches_pointwise_sum():
    d = dist_for(0b110101)
    for j0 in range(-10, 6):
        head = sum((delta_at(d, j) for j in range(j0, d.j_max + 1)), Dyadic(0))
        assert mass_at_least(d, j0) == head


def test_chebyshev_exhaustive():
    for t in range(1, 1 << 12):
        assert chebyshev_check(t)


def test_chebyshev_shift_values():
    assert chebyshev_shift(1) == 0
    assert chebyshev_shift(2) == 0  # ln 2 < 1
    assert chebyshev_shift(3) == 1  # ln 3 > 1
    assert chebyshev_shift(54) == 1  # e**4 ~ 54.6
    assert chebyshev_shift(55) == 2
    assert chebyshev_check(1) and chebyshev_check(1 << 20)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, (1 << 16) - 1))
def test_mass_and_support(t):
    d = dist_for(t)
    assert d.mass() == Dyadic(1)
    assert all(v >= 0 for v in d.nums) and d.tail >= 0
    assert d.j_max <= sum_of_digits(t)
    if t:
        assert d.j_min >= -t.bit_length()


@settings(max_examples=100, deadline=None)
@given(st.integers(1, (1 << 20) - 1))
def test_reversal(t):
    assert dist_for(t) == dist_for(reverse_binary(t))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, (1 << 30) - 1))
def test_pair_tracks_successor(t):
    p = pair_initial()
    for ch in bin(t)[2:]:
        p = pair_append_bit(p, int(ch))
    assert p.prefix == t
    assert p.lo == dist_for(t)
    assert p.hi == dist_for(t + 1)


def test_cusick_small_scale_sampled():
    rng = random.Random(7)
    for t in [rng.randrange(1, 1 << 16) for _ in range(2000)]:
        assert c_value(dist_for(t)) > Dyadic(1, 1)
