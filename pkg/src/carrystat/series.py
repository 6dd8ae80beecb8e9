"""Moment generating functions of the carry distributions.

With ``m_k(t) = sum_j delta(j, t) j**k / k!`` the generating functions
``F_t = sum_k (m_k(t) + m_k(t + 1)) x**k`` and
``G_t = sum_k (m_k(t) - m_k(t + 1)) x**k`` evolve under two fixed 2x2
matrices of power series when a binary digit is appended to ``t``:

    (F_2t,   G_2t)   = M0 (F_t, G_t)
    (F_2t+1, G_2t+1) = M1 (F_t, G_t)

with ``2 M0 = [[C + 1, S + 1], [1 - C, 1 - S]]`` and
``2 M1 = [[C + 1, S - 1], [C - 1, S + 1]]`` where ``C = cosh`` and
``S = sinh``.  Everything here is exact rational arithmetic modulo
``x**(N + 1)``.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .brackets import LOG2_HI

__all__ = [
    "TruncatedSeries",
    "SeriesMatrix",
    "exp_series",
    "cosh_series",
    "sinh_series",
    "base_series_M1",
    "fubini_coeff",
    "step_matrix",
    "block_matrix_power",
    "fg_for",
    "moment",
    "moments",
    "m2_exact",
    "m2_table",
    "bejian_faure_holds",
    "moments_csv",
    "fg_table",
    "inv_log2_power_lower",
    "low_order_expected",
    "low_order_coeffs_match",
    "higher_coeffs_bounded",
    "fubini_bounded",
    "start_values_bounded",
]


class TruncatedSeries:
    """Power series with exact rational coefficients, truncated after ``x**order``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, order: int | None = None):
        c = [Fraction(v) for v in coeffs]
        if order is not None:
            c = (c + [Fraction(0)] * (order + 1))[: order + 1]
        if not c:
            raise ValueError("a series needs at least one coefficient")
        self.coeffs = tuple(c)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, value, order: int) -> TruncatedSeries:
        return cls([value], order)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k <= self.order else Fraction(0)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"TruncatedSeries({[str(c) for c in self.coeffs]})"

    def _check(self, other: TruncatedSeries) -> None:
        if other.order != self.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self + TruncatedSeries.constant(other, self.order)
        self._check(other)
        return TruncatedSeries([a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries([-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            f = Fraction(other)
            return TruncatedSeries([a * f for a in self.coeffs])
        self._check(other)
        a, b = self.coeffs, other.coeffs
        n = len(a)
        return TruncatedSeries(
            [sum(a[i] * b[k - i] for i in range(k + 1) if a[i] and b[k - i]) for k in range(n)]
        )

    __rmul__ = __mul__

    def inverse(self) -> TruncatedSeries:
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        inv = [1 / a[0]]
        for k in range(1, len(a)):
            inv.append(-sum(a[i] * inv[k - i] for i in range(1, k + 1)) / a[0])
        return TruncatedSeries(inv)

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.inverse()
        return self * (1 / Fraction(other))


class SeriesMatrix:
    """2x2 matrix ``[[a, b], [c, d]]`` of truncated series of one order."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        orders = {e.order for e in (a, b, c, d)}
        if len(orders) != 1:
            raise ValueError("all entries must share one order")
        self.a, self.b, self.c, self.d = a, b, c, d

    @property
    def order(self) -> int:
        return self.a.order

    @property
    def entries(self) -> tuple[TruncatedSeries, ...]:
        return (self.a, self.b, self.c, self.d)

    @classmethod
    def constant(cls, rows, order: int) -> SeriesMatrix:
        (a, b), (c, d) = rows
        k = TruncatedSeries.constant
        return cls(k(a, order), k(b, order), k(c, order), k(d, order))

    @classmethod
    def identity(cls, order: int) -> SeriesMatrix:
        return cls.constant(((1, 0), (0, 1)), order)

    def __eq__(self, other):
        if isinstance(other, SeriesMatrix):
            return self.entries == other.entries
        return NotImplemented

    def __add__(self, other: SeriesMatrix) -> SeriesMatrix:
        return SeriesMatrix(*(x + y for x, y in zip(self.entries, other.entries)))

    def scale(self, s) -> SeriesMatrix:
        """Multiply every entry by a scalar or by a series."""
        return SeriesMatrix(*(x * s for x in self.entries))

    def __matmul__(self, other: SeriesMatrix) -> SeriesMatrix:
        return SeriesMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def apply(self, f: TruncatedSeries, g: TruncatedSeries) -> tuple[TruncatedSeries, TruncatedSeries]:
        return self.a * f + self.b * g, self.c * f + self.d * g

    def power(self, m: int) -> SeriesMatrix:
        out = SeriesMatrix.identity(self.order)
        for _ in range(m):
            out = out @ self
        return out


# -- elementary series ------------------------------------------------------


def exp_series(order: int, scale=1) -> TruncatedSeries:
    """``exp(scale * x)``."""
    s = Fraction(scale)
    return TruncatedSeries([s**k / factorial(k) for k in range(order + 1)])


def cosh_series(order: int) -> TruncatedSeries:
    return TruncatedSeries([Fraction(1, factorial(k)) if k % 2 == 0 else 0 for k in range(order + 1)])


def sinh_series(order: int) -> TruncatedSeries:
    return TruncatedSeries([Fraction(1, factorial(k)) if k % 2 else 0 for k in range(order + 1)])


@lru_cache(maxsize=64)
def base_series_M1(order: int) -> TruncatedSeries:
    """MGF of ``delta(., 1)``: ``e**x / (2 - e**-x)``."""
    return exp_series(order) / (2 - exp_series(order, -1))


@lru_cache(maxsize=None)
def _fubini_list(n: int) -> tuple[Fraction, ...]:
    # (2 - e**x) * f = 1: f_k = sum_{i=1}^{k} f_{k-i} / i!  (Cauchy product).
    f = [Fraction(1)]
    for k in range(1, n + 1):
        f.append(sum(f[k - i] / factorial(i) for i in range(1, k + 1)))
    return tuple(f)


def fubini_coeff(k: int) -> Fraction:
    """``[x**k] 1 / (2 - e**x)``: ordered Bell number over ``k!``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return _fubini_list(max(k, 8))[k]


# -- the digit matrices ------------------------------------------------------


@lru_cache(maxsize=8)
def _block_pieces(order: int):
    ch, sh = cosh_series(order), sinh_series(order)
    one = TruncatedSeries.constant(1, order)
    # (hyperbolic part, constant part, tail direction) for each digit
    zero_digit = (
        SeriesMatrix(ch, sh, -ch, -sh),
        SeriesMatrix.constant(((1, 1), (1, 1)), order),
        SeriesMatrix.constant(((1, 1), (-1, -1)), order),
    )
    one_digit = (
        SeriesMatrix(ch, sh, ch, sh),
        SeriesMatrix.constant(((1, -1), (-1, 1)), order),
        SeriesMatrix.constant(((1, -1), (1, -1)), order),
    )
    return one, zero_digit, one_digit


def step_matrix(bit: int, order: int) -> SeriesMatrix:
    """``M0`` or ``M1`` to the given order."""
    _, p0, p1 = _block_pieces(order)
    hyper, const, _ = p0 if bit == 0 else p1
    return (hyper + const).scale(Fraction(1, 2))


def block_matrix_power(bit: int, m: int, order: int) -> SeriesMatrix:
    """``M_bit ** m`` from its closed form (appending a block of ``m`` equal digits).

    Twice the power is ``w**(m-1) hyper + const + e**x / (2 - e**-x) (1 - w**(m-1)) tail``
    with ``w = e**-x / 2`` for digit 0, and the mirror image under
    ``x -> -x`` for digit 1.
    """
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    if m < 1:
        raise ValueError("block length m must be >= 1")
    one, p0, p1 = _block_pieces(order)
    hyper, const, tail = p0 if bit == 0 else p1
    sign = -1 if bit == 0 else 1
    w_pow = exp_series(order, sign * (m - 1)) * Fraction(1, 2 ** (m - 1))
    e = exp_series(order, -sign)
    mixer = e / (2 - exp_series(order, sign)) * (one - w_pow)
    return (hyper.scale(w_pow) + const + tail.scale(mixer)).scale(Fraction(1, 2))


# -- moments -------------------------------------------------------------------


def _cauchy_cs(f, g, order: int):
    """Coefficients of ``cosh * f + sinh * g``."""
    inv = _inv_factorials(order)
    out = []
    for k in range(order + 1):
        acc = Fraction(0)
        for l in range(k + 1):
            src = f if l % 2 == 0 else g
            v = src[k - l]
            if v:
                acc += inv[l] * v
        out.append(acc)
    return out


@lru_cache(maxsize=64)
def _inv_factorials(order: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(1, factorial(l)) for l in range(order + 1))


def _apply_bit(f, g, bit: int, order: int):
    p = _cauchy_cs(f, g, order)
    if bit == 0:
        nf = [(pk + fk + gk) / 2 for pk, fk, gk in zip(p, f, g)]
        ng = [(fk + gk - pk) / 2 for pk, fk, gk in zip(p, f, g)]
    else:
        nf = [(pk + fk - gk) / 2 for pk, fk, gk in zip(p, f, g)]
        ng = [(pk - fk + gk) / 2 for pk, fk, gk in zip(p, f, g)]
    return nf, ng


def _initial_fg(order: int):
    m1 = base_series_M1(order).coeffs
    f = [(k == 0) + c for k, c in enumerate(m1)]
    g = [(k == 0) - c for k, c in enumerate(m1)]
    return [Fraction(v) for v in f], [Fraction(v) for v in g]


def fg_for(t: int, order: int) -> tuple[TruncatedSeries, TruncatedSeries]:
    """``(F_t, G_t)`` to order ``order``, digits of ``t`` read most significant first."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if order < 0:
        raise ValueError("order must be nonnegative")
    f, g = _initial_fg(order)
    for ch in bin(t)[2:] if t else "":
        f, g = _apply_bit(f, g, ch == "1", order)
    return TruncatedSeries(f), TruncatedSeries(g)


def fg_table(bits: int, order: int):
    """``{t: (a_coeffs, b_coeffs)}`` for every ``0 <= t < 2**bits``, built by
    extending each prefix once."""
    table = {0: _initial_fg(order)}
    frontier = [1]
    f0, g0 = table[0]
    table[1] = _apply_bit(f0, g0, 1, order)
    while frontier:
        nxt = []
        for t in frontier:
            if 2 * t >= 1 << bits:
                continue
            f, g = table[t]
            table[2 * t] = _apply_bit(f, g, 0, order)
            table[2 * t + 1] = _apply_bit(f, g, 1, order)
            nxt += [2 * t, 2 * t + 1]
        frontier = nxt
    return table


def moments(t: int, kmax: int) -> list[Fraction]:
    """``[m_0(t), ..., m_kmax(t)]``."""
    f, g = fg_for(t, kmax)
    return [(a + b) / 2 for a, b in zip(f, g)]


def moment(t: int, k: int) -> Fraction:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return moments(t, k)[k]


def m2_exact(t: int) -> Fraction:
    """``m_2(t) = sum_i e_i - sum_{i<j} e_i e_j 2**(i - j)`` over the bits ``e`` of ``t``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    nu = max(t.bit_length() - 1, 0)
    low = 0  # sum of e_i 2**i over the bits already passed
    pairs = 0  # scaled by 2**nu
    for j in range(t.bit_length()):
        if t >> j & 1:
            pairs += low << (nu - j)
            low += 1 << j
    return Fraction(bin(t).count("1")) - Fraction(pairs, 1 << nu)


def m2_table(n: int) -> list[Fraction]:
    """``m_2(t)`` for ``0 <= t < n`` from ``m_2(2t+1) = (m_2(t) + m_2(t+1) + 1) / 2``."""
    table = [Fraction(0), Fraction(1)] + [Fraction(0)] * max(n - 1, 0)
    for t in range(2, n + 1):
        h = t >> 1
        table[t] = table[h] if t % 2 == 0 else (table[h] + table[h + 1] + 1) / 2
    return table[:n]


def bejian_faure_holds(t: int, m2: Fraction | None = None) -> bool:
    """``m_2(t) <= log2(t) / 3 + 1``, decided exactly."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if m2 is None:
        m2 = m2_exact(t)
    # 3 (m2 - 1) = p / q <= log2 t  <=>  2**p <= t**q
    x = 3 * (m2 - 1)
    if x <= 0:
        return True
    lo = t.bit_length() - 1  # log2 t in [lo, lo + 1)
    if x <= lo:
        return True
    if x >= lo + 1:
        return False
    return 1 << x.numerator <= t**x.denominator


# -- coefficient bounds --------------------------------------------------------
# Bounds of the form c * (log 2)**-k are checked against c / LOG2_HI**k, the
# smaller rational side, so a pass never relies on the bracket width.


def inv_log2_power_lower(k: int) -> Fraction:
    """A rational lower bound for ``(log 2)**-k``."""
    return 1 / LOG2_HI**k


def low_order_expected(bit: int, m: int) -> dict[str, tuple[Fraction, Fraction, Fraction]]:
    """Predicted ``x**0, x**1, x**2`` coefficients of the four entries of ``M_bit**m``.

    ``None`` marks a coefficient the prediction leaves open.
    """
    half = Fraction(2**m - 1, 2 ** (m + 1))
    full = Fraction(2**m - 1, 2**m)
    sign = 1 if bit == 0 else -1
    return {
        "a": (Fraction(1), Fraction(0), half),
        "b": (sign * full, None, None),
        "c": (Fraction(0), Fraction(0), -sign * half),
        "d": (Fraction(1, 2**m), None, None),
    }


def low_order_coeffs_match(bit: int, m: int) -> bool:
    mat = block_matrix_power(bit, m, 2)
    for name, want in low_order_expected(bit, m).items():
        got = getattr(mat, name).coeffs
        if any(w is not None and w != g for w, g in zip(want, got)):
            return False
    return True


def higher_coeffs_bounded(bit: int, m: int, kmax: int) -> bool:
    """``|[x**k] entry| <= 2 (log 2)**-k`` for every entry of ``M_bit**m`` and ``1 <= k <= kmax``."""
    mat = block_matrix_power(bit, m, kmax)
    return all(
        abs(e[k]) <= 2 * inv_log2_power_lower(k) for e in mat.entries for k in range(1, kmax + 1)
    )


def fubini_bounded(k: int) -> bool:
    """``fubini_coeff(k) <= (log 2)**-k``."""
    return fubini_coeff(k) <= inv_log2_power_lower(k)


def start_values_bounded(kmax: int) -> bool:
    """``a_k(0) <= (log 2)**-k`` and ``|b_k(0)| <= (log 2)**-k`` for ``1 <= k <= kmax``."""
    f, g = fg_for(0, kmax)
    return all(
        f[k] <= inv_log2_power_lower(k) and abs(g[k]) <= inv_log2_power_lower(k)
        for k in range(1, kmax + 1)
    )


def moments_csv(rows) -> str:
    """CSV text with columns t, k, numerator, denominator."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "k", "numerator", "denominator"])
    for t, k, v in rows:
        w.writerow([t, k, v.numerator, v.denominator])
    return buf.getvalue()
