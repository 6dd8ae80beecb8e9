"""Rigorous enclosures for nonnegative reals.

An :class:`Interval` holds binary floating-point endpoints ``lo <= x <= hi``
computed with outward (directed) rounding through ``mpmath.libmp``, so a
chain of operations yields a guaranteed enclosure.  The constants ledger
reaches magnitudes near ``2**(2**24)``; arbitrary exponents make that free.

Only the operations the effective bounds need are provided, and they assume
nonnegative operands (which lets products round endpoint-wise).
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from mpmath.libmp import (
    fzero,
    from_man_exp,
    from_rational,
    mpf_add,
    mpf_cmp,
    mpf_div,
    mpf_mul,
    to_rational,
)

__all__ = [
    "PREC",
    "PI_HI",
    "PI_LO",
    "LOG2_LO",
    "LOG2_HI",
    "Interval",
    "exp_neg_upper",
    "upper_from",
]

PREC = 256
_UP, _DOWN = "c", "f"  # round toward +inf / -inf

# Rational brackets for the transcendental constants.
PI_LO = Fraction("3.141592653")
PI_HI = Fraction("3.141592654")
LOG2_LO = Fraction("0.6931471805")
LOG2_HI = Fraction("0.6931471806")


def _from_fraction(q: Fraction, rnd: str):
    return from_rational(q.numerator, q.denominator, PREC, rnd)


def _sqrt(s, rnd: str):
    """Directed square root of a nonnegative mpf, via integer isqrt."""
    sign, man, exp, _ = s
    if sign:
        raise ValueError("square root of a negative bound")
    if not man:
        return fzero
    shift = 2 * PREC + 2
    if (exp - shift) % 2:
        shift += 1
    n = man << shift
    root = isqrt(n)
    if rnd == _UP and root * root != n:
        root += 1
    return from_man_exp(root, (exp - shift) // 2, PREC, rnd)


class Interval:
    """Enclosure ``[lo, hi]`` of a nonnegative real."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        if mpf_cmp(lo, hi) > 0:
            raise ValueError("empty interval")
        if lo[0]:
            raise ValueError("intervals here enclose nonnegative reals only")
        self.lo, self.hi = lo, hi

    # -- construction --------------------------------------------------

    @classmethod
    def exact(cls, value) -> Interval:
        q = Fraction(value)
        return cls(_from_fraction(q, _DOWN), _from_fraction(q, _UP))

    @classmethod
    def between(cls, lo, hi) -> Interval:
        return cls(_from_fraction(Fraction(lo), _DOWN), _from_fraction(Fraction(hi), _UP))

    @classmethod
    def zero(cls) -> Interval:
        return cls(fzero, fzero)

    # -- arithmetic -----------------------------------------------------

    @staticmethod
    def _lift(other) -> Interval:
        return other if isinstance(other, Interval) else Interval.exact(other)

    def __add__(self, other) -> Interval:
        o = self._lift(other)
        return Interval(mpf_add(self.lo, o.lo, PREC, _DOWN), mpf_add(self.hi, o.hi, PREC, _UP))

    __radd__ = __add__

    def __mul__(self, other) -> Interval:
        o = self._lift(other)
        return Interval(mpf_mul(self.lo, o.lo, PREC, _DOWN), mpf_mul(self.hi, o.hi, PREC, _UP))

    __rmul__ = __mul__

    def __truediv__(self, other) -> Interval:
        o = self._lift(other)
        if not o.lo[1]:
            raise ZeroDivisionError("divisor interval contains 0")
        return Interval(mpf_div(self.lo, o.hi, PREC, _DOWN), mpf_div(self.hi, o.lo, PREC, _UP))

    def __rtruediv__(self, other) -> Interval:
        return self._lift(other) / self

    def __pow__(self, n: int) -> Interval:
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        result, base = Interval.exact(1), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def sqrt(self) -> Interval:
        return Interval(_sqrt(self.lo, _DOWN), _sqrt(self.hi, _UP))

    def hull(self, other: Interval) -> Interval:
        """Enclosure of the larger of the two values (endpoint-wise max)."""
        lo = self.lo if mpf_cmp(self.lo, other.lo) >= 0 else other.lo
        hi = self.hi if mpf_cmp(self.hi, other.hi) >= 0 else other.hi
        return Interval(lo, hi)

    # -- certified comparisons ------------------------------------------

    def certainly_le(self, other) -> bool:
        return mpf_cmp(self.hi, self._lift(other).lo) <= 0

    def certainly_lt(self, other) -> bool:
        return mpf_cmp(self.hi, self._lift(other).lo) < 0

    # -- export ---------------------------------------------------------

    def upper(self) -> Fraction:
        p, q = to_rational(self.hi)
        return Fraction(p, q)

    def lower(self) -> Fraction:
        p, q = to_rational(self.lo)
        return Fraction(p, q)

    def ceil(self) -> int:
        """Smallest integer certainly >= the enclosed value."""
        p, q = to_rational(self.hi)
        return -(-p // q)

    def log2_upper(self) -> float:
        """Approximate base-2 logarithm of the upper endpoint (for display)."""
        _, man, exp, bc = self.hi
        if not man:
            return float("-inf")
        return exp + bc + _log2_fraction(man, bc)

    def to_json(self) -> dict:
        return {"lo": _mpf_json(self.lo), "hi": _mpf_json(self.hi)}

    @classmethod
    def from_json(cls, obj: dict) -> Interval:
        return cls(_mpf_from_json(obj["lo"]), _mpf_from_json(obj["hi"]))

    def __repr__(self) -> str:
        return f"Interval(~2^{self.log2_upper():.6g})"


def _log2_fraction(man: int, bc: int) -> float:
    from math import log2

    top = man >> max(bc - 53, 0)
    return log2(top) - min(bc, 53)


def _mpf_json(s) -> dict:
    # Mantissas stay below 2**PREC, so decimal text is safe; exponents are small ints.
    sign, man, exp, _ = s
    man = int(man)
    return {"man": (-man if sign else man), "exp": int(exp)}


def _mpf_from_json(obj: dict):
    return from_man_exp(int(obj["man"]), int(obj["exp"]))


def _exp_lower(x: Fraction) -> Interval:
    """Lower enclosure endpoint of ``e**x`` for ``x >= 0`` (returned as an interval
    whose ``lo`` is rigorous; ``hi`` is not used by callers)."""
    # e**x = (e**y)**(2**s) with y = x / 2**s <= 1/2; Taylor partial sums of
    # e**y are lower bounds since all terms are positive.
    s = 0
    while x / (1 << s) > Fraction(1, 2):
        s += 1
    y = Interval.exact(x / (1 << s))
    term = Interval.exact(1)
    acc = Interval.exact(1)
    for n in range(1, 60):
        term = term * y / n
        acc = acc + term
    low = Interval(acc.lo, acc.lo)
    for _ in range(s):
        low = low * low
    return low


def exp_neg_upper(x) -> Fraction:
    """A rational upper bound for ``e**(-x)``, ``x >= 0``."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("x must be nonnegative")
    low = _exp_lower(x)
    return (Interval.exact(1) / low).upper()


def upper_from(value) -> Interval:
    """Point interval at an already-rigorous upper bound (lo set to 0)."""
    return Interval(fzero, _from_fraction(Fraction(value), _UP))

