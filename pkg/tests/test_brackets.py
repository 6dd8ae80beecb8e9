import math
from fractions import Fraction

import mpmath
from hypothesis import given, settings
from hypothesis import strategies as st

from carrystat.brackets import LOG2_HI, LOG2_LO, PI_HI, PI_LO, Interval, exp_neg_upper

pos = st.fractions(min_value=Fraction(1, 10**6), max_value=10**6, max_denominator=10**6)


def test_constant_brackets():
    assert LOG2_LO < Fraction(math.log(2)) < LOG2_HI
    assert PI_LO < Fraction(math.pi) < PI_HI
    with mpmath.workprec(200):
        assert mpmath.mpf(LOG2_LO.numerator) / LOG2_LO.denominator < mpmath.log(2)
        assert mpmath.mpf(LOG2_HI.numerator) / LOG2_HI.denominator > mpmath.log(2)


@settings(max_examples=200)
@given(pos, pos)
def test_operations_enclose(x, y):
    a, b = Interval.exact(x), Interval.exact(y)
    for iv, exact in ((a + b, x + y), (a * b, x * y), (a / b, x / y), (1 / a, 1 / x), (a**5, x**5)):
        assert iv.lower() <= exact <= iv.upper()
    s = a.sqrt()
    assert s.lower() ** 2 <= x <= s.upper() ** 2


@given(pos, pos)
def test_hull_and_order(x, y):
    # hull encloses the larger of the two values
    h = Interval.exact(x).hull(Interval.exact(y))
    assert h.lower() <= max(x, y) <= h.upper()
    if x < y:
        assert Interval.exact(x).certainly_lt(Interval.exact(y))


@given(pos)
def test_json_round_trip(x):
    iv = Interval.between(x, x * 2)
    back = Interval.from_json(iv.to_json())
    assert (back.lower(), back.upper()) == (iv.lower(), iv.upper())


@settings(max_examples=60)
@given(st.fractions(min_value=0, max_value=3000, max_denominator=64))
def test_exp_neg_upper(x):
    up = exp_neg_upper(x)
    with mpmath.workprec(400):
        assert mpmath.mpf(up.numerator) / up.denominator >= mpmath.exp(-mpmath.mpf(x.numerator) / x.denominator)


def test_ceil():
    assert Interval.exact(Fraction(7, 2)).ceil() == 4
    assert Interval.exact(4).ceil() == 4
