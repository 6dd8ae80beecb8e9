from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from carrystat.dyadic import Dyadic, dyadic_arith, dyadic_cmp, dyadic_to_decimal

MIN_CT = Dyadic(18169025645289, 45)

dyadics = st.builds(Dyadic, st.integers(-(1 << 80), 1 << 80), st.integers(0, 120))


def test_add_examples():
    assert dyadic_arith("add", Dyadic(1, 1), Dyadic(1, 2)) == Dyadic(3, 2)
    assert dyadic_arith("mul", Dyadic(3, 2), Dyadic(1, 0)) == Dyadic(3, 2)
    s = dyadic_arith("add", Dyadic(1, 2), Dyadic(1, 2))
    assert (s.num, s.exp) == (1, 1)


def test_cmp_examples():
    assert dyadic_cmp(Dyadic(1, 1), Dyadic(3, 2)) == -1
    assert dyadic_cmp(Dyadic(0), Dyadic(0)) == 0
    assert dyadic_cmp(MIN_CT, Dyadic(1, 1)) == 1


def test_decimal_examples():
    assert dyadic_to_decimal(Dyadic(3, 2), 4) == "0.7500"
    assert dyadic_to_decimal(MIN_CT, 6) == "0.516394"
    assert dyadic_to_decimal(Dyadic(0), 3) == "0.000"
    assert Dyadic(3, 2).to_decimal(1, "half_even") == "0.8"
    assert Dyadic(-3, 2).to_decimal(1) == "-0.7"


def test_exact_decimal():
    assert Dyadic(3, 2).to_exact_decimal() == "0.75"
    assert Dyadic(5).to_exact_decimal() == "5"
    assert MIN_CT.to_exact_decimal().startswith("0.516394767523962627")


def test_normalized_form():
    assert (Dyadic(12, 4).num, Dyadic(12, 4).exp) == (3, 2)
    assert (Dyadic(0, 9).num, Dyadic(0, 9).exp) == (0, 0)
    assert str(Dyadic(1)) == "1/2^0"
    assert str(Dyadic(0)) == "0/2^0"


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        Dyadic.parse("1/3")
    with pytest.raises(ValueError):
        dyadic_arith("div", Dyadic(1), Dyadic(1))


def test_immutable():
    with pytest.raises(AttributeError):
        Dyadic(1).foo = 2


@given(dyadics)
def test_canonical_round_trip(a):
    assert Dyadic.parse(str(a)) == a
    assert a.exp == 0 or a.num & 1
    assert a.num != 0 or a.exp == 0


@given(dyadics, dyadics, dyadics)
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


@given(dyadics)
def test_identities(a):
    assert dyadic_arith("add", a, dyadic_arith("neg", a)) == Dyadic(0)
    assert dyadic_arith("mul", a, Dyadic(1, 0)) == a
    again = Dyadic(a.num, a.exp)
    assert (again.num, again.exp) == (a.num, a.exp)


@given(dyadics, dyadics)
def test_matches_fractions(a, b):
    fa, fb = a.as_fraction(), b.as_fraction()
    assert (a + b).as_fraction() == fa + fb
    assert (a - b).as_fraction() == fa - fb
    assert (a * b).as_fraction() == fa * fb
    assert dyadic_cmp(a, b) == (fa > fb) - (fa < fb)


@given(dyadics, st.integers(1, 30))
def test_truncated_decimal_is_a_lower_bound(a, digits):
    text = dyadic_to_decimal(abs(a), digits)
    value = Fraction(text)
    assert value <= abs(a).as_fraction() < value + Fraction(1, 10**digits)
