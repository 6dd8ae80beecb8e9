"""Effective moment bounds and the block threshold.

The moments of ``delta(., t)`` grow polynomially in the number of blocks
``r`` of ``t``, with constants given by a recurrence involving
``(log 2)**-1``.  :func:`build_ledger` evaluates that recurrence
with rigorous enclosures, :func:`verify_moment_bounds` confronts it with
exact moments, and :func:`block_threshold` assembles the integral-splitting
argument into a :class:`ThresholdCertificate`: every ``t`` with at least
``min_blocks`` blocks of 1s has ``c_t > 1/2 - eps``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import mpmath

from .brackets import LOG2_HI, LOG2_LO, PI_HI, Interval, exp_neg_upper
from .carrydist import blocks_count, dist_for, mass_at_least, ones_blocks
from .dyadic import HALF, Dyadic
from .series import fg_for, fg_table

__all__ = [
    "ConstantsLedger",
    "build_ledger",
    "MomentBoundCheck",
    "MomentBoundReport",
    "verify_moment_bounds",
    "verify_moment_bounds_range",
    "expansion_blocks",
    "tail_radius",
    "tail_R",
    "choose_order",
    "choose_K",
    "ThresholdCertificate",
    "block_threshold",
    "recheck_certificate",
    "SoundnessReport",
    "chebyshev_check",
    "chebyshev_shift",
    "count_few_block_integers",
    "count_few_block_integers_bruteforce",
    "FewBlockCount",
    "InfeasibleSampleError",
    "random_many_block_integer",
    "soundness_sample",
]

# Where two readings of the first-row constants exist, the larger is taken.
FIRST_EVEN_NEXT = 1


# -- constants ledger ----------------------------------------------------------

_LEDGER_COLUMNS = ("f_even_lead", "f_even_next", "f_odd", "g_even_next", "g_odd", "aux_even", "aux_odd")


@dataclass
class ConstantsLedger:
    """Enclosures of the recurrence constants, indexed by ``k`` (index 0 unused).

    For the coefficients ``f_j`` and ``g_j`` of the two moment series of a
    ``t`` with ``r`` blocks, the columns bound

    * ``|f_2k|   <= f_even_lead[k] r**k + f_even_next[k] r**(k-1)``
    * ``|f_2k+1| <= f_odd[k] r**k``
    * ``|g_2k|   <= f_even_lead[k-1] r**(k-1) + g_even_next[k] r**(k-2)``
    * ``|g_2k+1| <= g_odd[k] r**(k-1)``

    and ``aux_even``/``aux_odd`` are the intermediate quantities of the
    induction.  Each entry encloses the recurrence value for some
    ``1 / log 2`` in the bracket, so its upper endpoint is a valid bound.
    """

    inv_log2: Interval
    f_even_lead: list = field(default_factory=lambda: [None])
    f_even_next: list = field(default_factory=lambda: [None])
    f_odd: list = field(default_factory=lambda: [None])
    g_even_next: list = field(default_factory=lambda: [None, None])
    g_odd: list = field(default_factory=lambda: [None])
    aux_even: list = field(default_factory=lambda: [None, None])
    aux_odd: list = field(default_factory=lambda: [None])
    notes: list = field(default_factory=list)
    # prefix maxima: _h[name][i] encloses max over indices 1..i (g_even_next starts at 2)
    _h: dict = field(default_factory=dict, repr=False)
    _pow: Interval | None = field(default=None, repr=False)  # inv_log2 ** (2 kmax)

    @property
    def kmax(self) -> int:
        return len(self.f_even_lead) - 1

    def odd_mean(self, k: int) -> Interval:
        """``(f_odd[k] + g_odd[k]) / 2``; zero at ``k = 0`` since first moments vanish."""
        if k == 0:
            return Interval.zero()
        return (self.f_odd[k] + self.g_odd[k]) / 2

    def _push_hull(self, name: str, value: Interval) -> None:
        h = self._h[name]
        h.append(h[-1].hull(value))

    def extend(self, kmax: int) -> ConstantsLedger:
        if self.kmax == 0:
            self._start()
        inv, h = self.inv_log2, self._h
        while self.kmax < kmax:
            k = self.kmax + 1
            pw = self._pow * inv * inv  # inv**(2k)
            inner = (
                3 + 2 * h["f_even_lead"][k - 2] + h["f_even_next"][k - 2] + h["f_odd"][k - 2]
                + h["g_even_next"][k - 1] + h["g_odd"][k - 1]
            )
            aux_even = 2 * pw * inner
            even_next = (2 * self.f_even_next[k - 1] + 3 * aux_even) / (k - 1) + 2 * pw
            g_next = self.f_even_next[k - 1] + 2 * aux_even + pw
            self._push_hull("g_even_next", g_next)
            pw1 = pw * inv
            inner = (
                3 + 2 * h["f_even_lead"][k - 1] + h["f_even_next"][k - 1] + h["f_odd"][k - 1]
                + h["g_even_next"][k] + h["g_odd"][k - 1]
            )
            aux_odd = 2 * pw1 * inner
            odd = 3 * aux_odd / k + 2 * pw1
            g_odd = 2 * aux_odd + pw1
            lead = self.f_even_lead[k - 1] * 3 / (2 * k)
            row = (lead, even_next, odd, g_next, g_odd, aux_even, aux_odd)
            for name, value in zip(_LEDGER_COLUMNS, row):
                getattr(self, name).append(value)
            for name, value in (("f_even_lead", lead), ("f_even_next", even_next), ("f_odd", odd), ("g_odd", g_odd)):
                self._push_hull(name, value)
            self._pow = pw
        return self

    def _start(self) -> None:
        inv = self.inv_log2
        inv3 = inv**3
        # At k = 1 the general auxiliary formula gives 6 inv**3; 6 inv**4 is
        # larger (inv > 1) and is the value used.
        aux_odd = 6 * inv**4
        lead, even_next = Interval.exact(2), Interval.exact(FIRST_EVEN_NEXT)
        # The k >= 2 shapes, with their extra inv**3 terms, dominate the
        # plain 3 aux and 2 aux values, so they are used at k = 1 too.
        odd, g_odd = 3 * aux_odd + 2 * inv3, 2 * aux_odd + inv3
        self.f_even_lead.append(lead)
        self.f_even_next.append(even_next)
        self.f_odd.append(odd)
        self.g_odd.append(g_odd)
        self.aux_odd.append(aux_odd)
        zero = Interval.zero()
        self._h = {
            "f_even_lead": [zero, lead], "f_even_next": [zero, even_next], "f_odd": [zero, odd],
            "g_odd": [zero, g_odd], "g_even_next": [zero, zero],
        }
        self._pow = inv * inv
        self.notes = [
            f"f_even_next[1] = {FIRST_EVEN_NEXT}",
            "aux_odd[1] = 6 (log 2)^-4, f_odd[1] = 3 aux_odd[1] + 2 (log 2)^-3, g_odd[1] = 2 aux_odd[1] + (log 2)^-3",
        ]

    def row(self, k: int) -> dict:
        def up(v):
            return None if v is None else v.to_json()["hi"]

        out = {"k": k}
        for name in _LEDGER_COLUMNS:
            col = getattr(self, name)
            out[name] = up(col[k]) if k < len(col) else None
        out["odd_mean"] = up(self.odd_mean(k))
        out["log2"] = {
            name: getattr(self, name)[k].log2_upper()
            for name in ("f_even_lead", "f_even_next", "f_odd", "g_odd", "aux_odd")
        }
        return out

    def to_json(self) -> dict:
        return {
            "kmax": self.kmax,
            "inv_log2_bracket": [str(self.inv_log2.lower()), str(self.inv_log2.upper())],
            "encoding": "each bound is man * 2**exp (an exact dyadic upper bound)",
            "notes": list(self.notes),
            "rows": [self.row(k) for k in range(1, self.kmax + 1)],
        }

    def upper(self, name: str, k: int) -> Fraction:
        return getattr(self, name)[k].upper()


def build_ledger(kmax: int, log2_lo=LOG2_LO, log2_hi=LOG2_HI) -> ConstantsLedger:
    """Ledger through ``kmax`` for ``log 2`` in ``[log2_lo, log2_hi]``."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    if not 0 < Fraction(log2_lo) <= Fraction(log2_hi) < 1:
        raise ValueError("need 0 < log2_lo <= log2_hi < 1")
    inv = Interval.between(1 / Fraction(log2_hi), 1 / Fraction(log2_lo))
    return ConstantsLedger(inv).extend(kmax)


# -- checking the moment bounds on concrete t ---------------------------------


@dataclass(frozen=True)
class MomentBoundCheck:
    name: str
    lhs: Fraction
    rhs: Fraction
    passed: bool


@dataclass
class MomentBoundReport:
    t: int
    r: int
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "r": self.r,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "lhs": str(c.lhs), "rhs": str(c.rhs), "pass": c.passed}
                for c in self.checks
            ],
        }


def _rhs_table(ledger: ConstantsLedger, kmax: int):
    return {
        name: [None] + [getattr(ledger, name)[k].upper() for k in range(1, kmax + 1)]
        for name in ("f_even_lead", "f_even_next", "f_odd", "g_odd")
    } | {"g_even_next": [None, None] + [ledger.g_even_next[k].upper() for k in range(2, kmax + 1)]}


def expansion_blocks(t: int) -> int:
    """Blocks of the full binary expansion of ``t``, a trailing block of 0s included."""
    if t < 1:
        return 0
    bits = bin(t)[2:]
    return 1 + sum(x != y for x, y in zip(bits, bits[1:]))


_CONVENTIONS = {"stated": blocks_count, "expansion": expansion_blocks}


def _block_counter(convention: str):
    try:
        return _CONVENTIONS[convention]
    except KeyError:
        raise ValueError(f"convention must be one of {sorted(_CONVENTIONS)}") from None


def _check_coeffs(t, f, g, kmax, up, r) -> MomentBoundReport:
    checks = []

    def add(name, lhs, rhs):
        checks.append(MomentBoundCheck(name, lhs, rhs, lhs <= rhs))

    add("f_0 = 2", abs(f[0] - 2), Fraction(0))
    add("f_1 = 0", abs(f[1]), Fraction(0))
    add("g_0 = 0", abs(g[0]), Fraction(0))
    add("g_1 = 0", abs(g[1]), Fraction(0))
    add("|f_2| <= f_even_lead[1] r + f_even_next[1]", abs(f[2]), up["f_even_lead"][1] * r + up["f_even_next"][1])
    add("|f_3| <= f_odd[1] r", abs(f[3]), up["f_odd"][1] * r)
    add("|g_2| <= 1", abs(g[2]), Fraction(1))
    add("|g_3| <= g_odd[1]", abs(g[3]), up["g_odd"][1])
    for k in range(2, kmax + 1):
        rk = Fraction(r) ** k
        rk1 = Fraction(r) ** (k - 1)
        rk2 = Fraction(r) ** (k - 2)
        add(
            f"|f_{2 * k}| <= f_even_lead[{k}] r^{k} + f_even_next[{k}] r^{k - 1}",
            abs(f[2 * k]),
            up["f_even_lead"][k] * rk + up["f_even_next"][k] * rk1,
        )
        add(f"|f_{2 * k + 1}| <= f_odd[{k}] r^{k}", abs(f[2 * k + 1]), up["f_odd"][k] * rk)
        add(
            f"|g_{2 * k}| <= f_even_lead[{k - 1}] r^{k - 1} + g_even_next[{k}] r^{k - 2}",
            abs(g[2 * k]),
            up["f_even_lead"][k - 1] * rk1 + up["g_even_next"][k] * rk2,
        )
        add(f"|g_{2 * k + 1}| <= g_odd[{k}] r^{k - 1}", abs(g[2 * k + 1]), up["g_odd"][k] * rk1)
    return MomentBoundReport(t, r, checks)


def verify_moment_bounds(
    t: int, kmax: int, ledger: ConstantsLedger | None = None, convention: str = "stated"
) -> MomentBoundReport:
    """Check the moment bounds for one ``t >= 1`` against the exact series coefficients.

    ``convention="stated"`` takes ``r = blocks_count(t)``, which ignores
    trailing zeros.  Since the coefficients also involve ``t + 1``,
    even ``t`` can then violate the bounds (``t = 6`` already does at
    ``k = 1``); ``convention="expansion"`` counts the trailing block of 0s
    too, which is what an induction over appended blocks actually controls.
    """
    count = _block_counter(convention)
    if t < 1:
        raise ValueError("t must be >= 1")
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    if ledger is None or ledger.kmax < kmax:
        ledger = build_ledger(kmax)
    f, g = fg_for(t, 2 * kmax + 1)
    return _check_coeffs(t, f.coeffs, g.coeffs, kmax, _rhs_table(ledger, kmax), count(t))


def verify_moment_bounds_range(
    bits: int, kmax: int, ledger: ConstantsLedger | None = None, convention: str = "stated"
):
    """Reports for every ``1 <= t < 2**bits`` (shared prefix computation)."""
    count = _block_counter(convention)
    if ledger is None or ledger.kmax < kmax:
        ledger = build_ledger(kmax)
    up = _rhs_table(ledger, kmax)
    table = fg_table(bits, 2 * kmax + 1)
    return [_check_coeffs(t, *table[t], kmax, up, count(t)) for t in range(1, 1 << bits)]


# -- threshold procedure -------------------------------------------------------

_TAIL_CUTOFF = 200
# sum_{m > 200} e**(-m**2/16) / m < e**(-2512) * 2 < 2**(-3000)
_TAIL_REMAINDER = Fraction(1, 1 << 3000)


@lru_cache(maxsize=1)
def _tail_suffix_sums() -> tuple[Fraction, ...]:
    """``out[m0]`` is a rigorous upper bound for ``sum_{m >= m0} e**(-m**2/16)/m``."""
    terms = [Fraction(0)] + [exp_neg_upper(Fraction(m * m, 16)) / m for m in range(1, _TAIL_CUTOFF + 1)]
    out = [Fraction(0)] * (_TAIL_CUTOFF + 2)
    out[_TAIL_CUTOFF + 1] = _TAIL_REMAINDER
    for m in range(_TAIL_CUTOFF, 0, -1):
        out[m] = out[m + 1] + terms[m]
    return tuple(out)


def tail_radius(epsilon) -> tuple[int, Fraction]:
    """Smallest radius ``>= 1`` whose certified tail bound is at most ``eps / 3``."""
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    sums = _tail_suffix_sums()
    for radius in range(1, _TAIL_CUTOFF + 2):
        if sums[radius] <= eps / 3:
            return radius, sums[radius]
    raise ValueError("epsilon too small for the tabulated tail")


# Names used by the build contract.
tail_R = tail_radius


def _two_pi() -> Interval:
    return Interval.exact(2 * PI_HI)


def _truncation_constant(ledger: ConstantsLedger, order: int) -> Interval:
    """``2 sqrt(lead_K lead_{K+1} (2K+2)/(2K+1)) (2 pi)**(2K+1)`` for ``K = order``."""
    # sqrt((2K)! (2K+2)!) / (2K+1)! = sqrt((2K+2) / (2K+1))
    ratio = Fraction(2 * order + 2, 2 * order + 1)
    lead = ledger.f_even_lead
    return 2 * (lead[order] * lead[order + 1] * ratio).sqrt() * _two_pi() ** (2 * order + 1)


def choose_order(epsilon, radius: int, ledger: ConstantsLedger) -> tuple[int, Interval]:
    """Smallest order with truncation constant times ``radius**(2 order + 1)``
    at most ``eps / 3``; the ledger must reach one past it."""
    eps = Fraction(epsilon)
    target = Interval.exact(eps / 3)
    for order in range(1, ledger.kmax):
        const = _truncation_constant(ledger, order)
        if (const * Interval.exact(radius) ** (2 * order + 1)).certainly_le(target):
            return order, const
    raise ValueError(f"no order <= {ledger.kmax - 1} satisfies the bound; enlarge the ledger")


choose_K = choose_order


def _choose_order_growing(eps: Fraction, radius: int, ledger: ConstantsLedger) -> tuple[int, Interval]:
    # Only f_even_lead enters the truncation constant; search with that
    # column alone, then extend the full ledger once.
    target = Interval.exact(eps / 3)
    lead = Interval.exact(2)
    base = _two_pi() * Interval.exact(radius)
    step = base * base
    ratio_pow = step  # (2 pi radius)**(2 order) at order 1
    order = 0
    while True:
        order += 1
        lead_next = lead * 3 / (2 * (order + 1))
        value = 2 * (lead * lead_next * Fraction(2 * order + 2, 2 * order + 1)).sqrt() * base * ratio_pow
        if value.certainly_le(target):
            break
        lead = lead_next
        ratio_pow = ratio_pow * step
        if order > 1_000_000:
            raise ValueError("order search did not terminate")
    ledger.extend(order + 1)
    return choose_order(eps, radius, ledger)


@dataclass
class ThresholdCertificate:
    """Every ``t`` with at least ``min_blocks`` blocks of 1s has ``c_t > 1/2 - epsilon``."""

    epsilon: Fraction
    radius: int
    order: int
    tail_value: Fraction
    truncation_bound: Interval
    r0: Interval
    odd_sum: Interval  # sum_{k<order} (2 pi radius)**(2k+1) odd_mean[k]
    r1: Interval
    r_required: int
    min_blocks: int
    notes: list = field(default_factory=list)
    ledger: ConstantsLedger | None = field(default=None, repr=False)

    def witnesses(self, ledger: ConstantsLedger | None = None) -> dict:
        """Re-derive every inequality from ``(eps, radius, order, r)`` and a ledger."""
        if self.order == 0:
            return {"trivial": self.epsilon >= 1 and self.min_blocks == 1}
        order = self.order
        ledger = ledger or self.ledger or build_ledger(order + 1)
        if ledger.kmax < order + 1:
            ledger.extend(order + 1)
        eps3 = Interval.exact(self.epsilon / 3)
        tail = _tail_suffix_sums()[self.radius]
        const = _truncation_constant(ledger, order)
        r = Interval.exact(self.r_required)
        r0 = _r0(ledger, order)
        odd = _odd_sum(ledger, order, self.radius)
        return {
            "tail <= eps/3": tail <= self.epsilon / 3,
            "truncation * radius^(2 order + 1) <= eps/3": (
                const * Interval.exact(self.radius) ** (2 * order + 1)
            ).certainly_le(eps3),
            "r >= 8": self.r_required >= 8,
            "r >= r0": r0.certainly_le(r),
            "odd_sum / sqrt(r) <= eps/3": (odd * odd * Fraction(9) / (self.epsilon * self.epsilon)).certainly_le(r),
            "min_blocks = ceil((r+1)/2)": self.min_blocks == -(-(self.r_required + 1) // 2),
        }

    def verify(self, ledger: ConstantsLedger | None = None) -> bool:
        return all(self.witnesses(ledger).values())

    def to_json(self) -> dict:
        out = {
            "epsilon": str(self.epsilon),
            "radius": self.radius,
            "order": self.order,
            "tail_value": _frac_json(self.tail_value),
            "truncation_bound": self.truncation_bound.to_json(),
            "r0": self.r0.to_json(),
            "odd_sum": self.odd_sum.to_json(),
            "r1": self.r1.to_json(),
            "r_required_hex": hex(self.r_required),
            "r_required_log2": _log2_int(self.r_required),
            "min_blocks_hex": hex(self.min_blocks),
            "min_blocks_log2": _log2_int(self.min_blocks),
            "notes": list(self.notes),
        }
        if self.order:
            out["witnesses"] = self.witnesses()
        return out


def recheck_certificate(obj: dict) -> dict:
    """Re-derive the witnesses of a serialized certificate from its integers alone."""
    cert = ThresholdCertificate(
        Fraction(obj["epsilon"]), int(obj["radius"]), int(obj["order"]), Fraction(0), Interval.zero(),
        Interval.zero(), Interval.zero(), Interval.zero(),
        int(obj["r_required_hex"], 16), int(obj["min_blocks_hex"], 16),
    )
    return cert.witnesses()


def _frac_json(q: Fraction) -> dict:
    return {"num_hex": hex(q.numerator), "den_hex": hex(q.denominator), "approx": float(q)}


def _log2_int(n: int) -> float | None:
    if n <= 0:
        return None
    bl = n.bit_length()
    return bl - 53 + float(mpmath.log(n >> max(bl - 53, 0), 2)) if bl > 53 else float(mpmath.log(n, 2))


def _r0(ledger: ConstantsLedger, order: int) -> Interval:
    nxt, lead = ledger.f_even_next, ledger.f_even_lead
    return (nxt[order] / lead[order]).hull(nxt[order + 1] / lead[order + 1])


def _odd_sum(ledger: ConstantsLedger, order: int, radius: int) -> Interval:
    base = _two_pi() * Interval.exact(radius)
    sq = base * base
    power = base  # (2 pi radius)**(2k+1) at k = 0
    total = Interval.zero()
    for k in range(order):
        total = total + power * ledger.odd_mean(k)
        power = power * sq
    return total


def block_threshold(epsilon, ledger: ConstantsLedger | None = None) -> ThresholdCertificate:
    """Run the integral-splitting procedure for ``eps``."""
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if eps >= 1:
        return ThresholdCertificate(
            eps, 0, 0, Fraction(0), Interval.zero(), Interval.zero(), Interval.zero(),
            Interval.zero(), 0, 1, ["eps >= 1: every t satisfies c_t > 0 > 1/2 - eps"],
        )
    radius, tail = tail_radius(eps)
    ledger = ledger or build_ledger(2)
    order, const = _choose_order_growing(eps, radius, ledger)
    r0 = _r0(ledger, order)
    odd = _odd_sum(ledger, order, radius)
    r1 = (odd * 3 / eps) ** 2
    r_required = max(8, r0.ceil(), r1.ceil())
    min_blocks = -(-(r_required + 1) // 2)
    notes = list(ledger.notes) + [
        "r0 = max over order, order+1 of f_even_next / f_even_lead",
        "r1 = (3 odd_sum / eps)^2",
    ]
    return ThresholdCertificate(eps, radius, order, tail, const, r0, odd, r1, r_required, min_blocks, notes, ledger)


# -- elementary consequences ----------------------------------------------------


def chebyshev_shift(t: int) -> int:
    """``floor(sqrt(ln t))`` for ``t >= 1``."""
    if t < 1:
        raise ValueError("t must be >= 1")
    with mpmath.workprec(64 + 2 * t.bit_length().bit_length()):
        ln = mpmath.log(t)
    n = int(mpmath.floor(mpmath.sqrt(ln)))
    # ln t is irrational for t > 1, so no boundary ties; confirm with e**(n*n).
    with mpmath.workprec(128):
        while mpmath.exp((n + 1) ** 2) <= t:
            n += 1
        while n and mpmath.exp(n * n) > t:
            n -= 1
    return n


def chebyshev_check(t: int) -> bool:
    """``sum_{j >= -sqrt(ln t) - 1} delta(j, t) > 1/2`` with exact densities."""
    return mass_at_least(dist_for(t), -chebyshev_shift(t) - 1) > HALF


@dataclass(frozen=True)
class FewBlockCount:
    bits: int
    min_blocks: int
    count: int
    bound: int

    @property
    def holds(self) -> bool:
        return self.count <= self.bound


def count_few_block_integers(bits: int, min_blocks: int) -> FewBlockCount:
    """Number of ``t < 2**bits`` with fewer than ``min_blocks`` blocks of 1s,
    against ``bits**(2 min_blocks - 2)``.

    A pattern with ``l`` blocks of 1s below ``2**bits`` is fixed by ``2l``
    boundary positions among ``bits + 1``.
    """
    if bits < 1 or min_blocks < 1:
        raise ValueError("bits and min_blocks must be >= 1")
    count = sum(comb(bits + 1, 2 * l) for l in range(min_blocks))
    return FewBlockCount(bits, min_blocks, count, bits ** (2 * min_blocks - 2))


def count_few_block_integers_bruteforce(bits: int, min_blocks: int) -> int:
    return sum(1 for t in range(1 << bits) if ones_blocks(t) < min_blocks)


# -- sampled soundness -----------------------------------------------------------


class InfeasibleSampleError(RuntimeError):
    """The requested block count needs more bits than the sampler allows."""


def random_many_block_integer(
    min_blocks: int, rng: random.Random, max_bits: int = 1 << 16, extra_blocks: int = 4
) -> int:
    """A random ``t`` with at least ``min_blocks`` blocks of 1s."""
    min_blocks = max(min_blocks, 1)
    if 2 * min_blocks - 1 > max_bits:
        raise InfeasibleSampleError(
            f"t with 2**{min_blocks.bit_length() - 1}+ blocks of 1s needs more than {max_bits} bits"
        )
    ell = min_blocks + rng.randrange(extra_blocks + 1)
    while 2 * ell - 1 > max_bits:
        ell -= 1
    bits = []
    budget = max_bits - (2 * ell - 1)
    for i in range(2 * ell - 1):
        run = 1
        while budget and rng.random() < 0.5 and run < 6:
            run += 1
            budget -= 1
        bits.append(("1" if i % 2 == 0 else "0") * run)
    return int("".join(bits), 2) << rng.randrange(3)


@dataclass
class SoundnessReport:
    epsilon: Fraction
    min_blocks: int
    samples: int
    violations: list
    min_ct: Dyadic | None

    @property
    def passed(self) -> bool:
        return self.samples > 0 and not self.violations


def soundness_sample(
    cert: ThresholdCertificate, n: int = 1000, seed: int = 0, max_bits: int = 1 << 16
) -> SoundnessReport:
    """Exact ``c_t > 1/2 - eps`` on ``n`` random ``t`` with at least ``cert.min_blocks`` blocks of 1s."""
    rng = random.Random(seed)
    bound = Fraction(1, 2) - cert.epsilon
    violations, best = [], None
    for _ in range(n):
        t = random_many_block_integer(cert.min_blocks, rng, max_bits)
        c = mass_at_least(dist_for(t), 0)
        best = c if best is None or c < best else best
        if not c.as_fraction() > bound:
            violations.append(t)
    return SoundnessReport(cert.epsilon, cert.min_blocks, n, violations, best)
