"""Exact arithmetic on rationals whose denominator is a power of two.

A :class:`Dyadic` stores ``num / 2**exp`` with ``num`` odd (or zero, in which
case ``exp == 0``).  The denominator is kept as an exponent and never
materialized, so deep recursions that halve values thousands of times stay
cheap.  The canonical text form is ``"num/2^exp"``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Integral, Rational

__all__ = ["Dyadic", "dyadic_arith", "dyadic_cmp", "dyadic_to_decimal"]

_CANONICAL = re.compile(r"\A\s*(?P<num>[-+]?\d+)\s*(?:/\s*2\^(?P<exp>\d+))?\s*\Z")


def _normalize(num: int, exp: int) -> tuple[int, int]:
    if num == 0:
        return 0, 0
    if exp < 0:
        return num << -exp, 0
    tz = (num & -num).bit_length() - 1
    shift = min(tz, exp)
    return num >> shift, exp - shift


class Dyadic:
    """Immutable dyadic rational ``num / 2**exp``."""

    __slots__ = ("_num", "_exp")

    def __init__(self, num: int = 0, exp: int = 0):
        if not isinstance(num, Integral) or not isinstance(exp, Integral):
            raise TypeError("Dyadic needs integer numerator and exponent")
        n, e = _normalize(int(num), int(exp))
        object.__setattr__(self, "_num", n)
        object.__setattr__(self, "_exp", e)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    @property
    def num(self) -> int:
        return self._num

    @property
    def exp(self) -> int:
        return self._exp

    # -- construction -----------------------------------------------------

    @classmethod
    def parse(cls, text: str) -> Dyadic:
        """Parse ``"num/2^exp"`` or a bare integer."""
        m = _CANONICAL.match(text)
        if m is None:
            raise ValueError(f"not a dyadic literal: {text!r}")
        return cls(int(m["num"]), int(m["exp"] or 0))

    @classmethod
    def from_fraction(cls, value) -> Dyadic:
        if isinstance(value, Dyadic):
            return value
        q = Fraction(value)
        den = q.denominator
        if den & (den - 1):
            raise ValueError(f"{q} is not dyadic")
        return cls(q.numerator, den.bit_length() - 1)

    @classmethod
    def _coerce(cls, other):
        if isinstance(other, Dyadic):
            return other
        if isinstance(other, Integral):
            return cls(int(other), 0)
        if isinstance(other, Rational):
            return cls.from_fraction(other)
        return NotImplemented

    # -- conversion -------------------------------------------------------

    def as_fraction(self) -> Fraction:
        return Fraction(self._num, 1 << self._exp)

    def __float__(self) -> float:
        return float(self.as_fraction())

    def __str__(self) -> str:
        return f"{self._num}/2^{self._exp}"

    def __repr__(self) -> str:
        return f"Dyadic('{self}')"

    def to_decimal(self, digits: int, rounding: str = "down") -> str:
        """Decimal rendering with ``digits`` places.

        ``rounding`` is ``"down"`` (truncate toward zero, so every printed
        digit is a true digit of the value) or ``"half_even"``.
        """
        if digits < 1:
            raise ValueError("digits must be >= 1")
        if rounding not in ("half_even", "down"):
            raise ValueError(f"unknown rounding {rounding!r}")
        sign = "-" if self._num < 0 else ""
        den = 1 << self._exp
        q, r = divmod(abs(self._num) * 10**digits, den)
        twice = 2 * r
        if rounding == "half_even" and (twice > den or (twice == den and q & 1)):
            q += 1
        if q == 0:
            sign = ""
        whole, frac = divmod(q, 10**digits)
        return f"{sign}{whole}.{frac:0{digits}d}"

    def to_exact_decimal(self, max_digits: int = 20) -> str:
        """Shortest decimal string: exact when it has at most ``max_digits``
        places, otherwise truncated to ``max_digits`` places."""
        if self._exp == 0:
            return str(self._num)
        text = self.to_decimal(min(self._exp, max_digits))
        return text.rstrip("0").rstrip(".") if "." in text else text

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        e = max(self._exp, other._exp)
        return Dyadic((self._num << (e - self._exp)) + (other._num << (e - other._exp)), e)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Dyadic(self._num * other._num, self._exp + other._exp)

    __rmul__ = __mul__

    def __neg__(self) -> Dyadic:
        return Dyadic(-self._num, self._exp)

    def __pos__(self) -> Dyadic:
        return self

    def __abs__(self) -> Dyadic:
        return Dyadic(abs(self._num), self._exp)

    def ldexp(self, k: int) -> Dyadic:
        """Multiply by ``2**k`` (``k`` may be negative)."""
        return Dyadic(self._num, self._exp - k)

    def __bool__(self) -> bool:
        return self._num != 0

    # -- ordering ---------------------------------------------------------

    def _cmp(self, other) -> int:
        e = max(self._exp, other._exp)
        a = self._num << (e - self._exp)
        b = other._num << (e - other._exp)
        return (a > b) - (a < b)

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self._num == other._num and self._exp == other._exp
        if isinstance(other, Rational):
            return self.as_fraction() == other
        return NotImplemented

    def __hash__(self):
        if self._exp == 0:
            return hash(self._num)
        return hash(self.as_fraction())

    def __lt__(self, other):
        other = self._coerce(other)
        return other if other is NotImplemented else self._cmp(other) < 0

    def __le__(self, other):
        other = self._coerce(other)
        return other if other is NotImplemented else self._cmp(other) <= 0

    def __gt__(self, other):
        other = self._coerce(other)
        return other if other is NotImplemented else self._cmp(other) > 0

    def __ge__(self, other):
        other = self._coerce(other)
        return other if other is NotImplemented else self._cmp(other) >= 0

    def __reduce__(self):
        return (Dyadic, (self._num, self._exp))


ZERO = Dyadic(0)
ONE = Dyadic(1)
HALF = Dyadic(1, 1)


def dyadic_arith(op: str, a: Dyadic, b: Dyadic | None = None) -> Dyadic:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    raise ValueError(f"unknown op {op!r}")


def dyadic_cmp(a: Dyadic, b: Dyadic) -> int:
    """-1, 0 or 1 as ``a`` is less than, equal to, or greater than ``b``."""
    return a._cmp(b)


def dyadic_to_decimal(a: Dyadic, digits: int, rounding: str = "down") -> str:
    return a.to_decimal(digits, rounding)
