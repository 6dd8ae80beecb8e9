"""Exact carry distributions ``delta(j, t)`` of the binary sum of digits.

``delta(j, t)`` is the asymptotic density of the integers ``n`` with
``s(n + t) - s(n) = j``.  For fixed ``t`` it is a probability distribution
on the integers with finite upper support and a geometric lower tail, and it
obeys

    delta(j, 2t)     = delta(j, t)
    delta(j, 2t + 1) = delta(j - 1, t) / 2 + delta(j + 1, t + 1) / 2.

The recurrence couples ``t`` and ``t + 1``, so the state carried along the
binary digits of ``t`` (most significant first) is the pair of
distributions for ``(a, a + 1)`` where ``a`` is the prefix read so far.

A :class:`CarryDistribution` stores the values on ``[j_min, j_max]`` as
integer numerators over a shared ``2**exp``, plus ``tail``: the numerator of
``delta(j_min - 1)``.  Below ``j_min`` the values halve at every step.  The
representation is canonical, so equal distributions compare equal
structurally.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

from .dyadic import Dyadic

__all__ = [
    "CarryDistribution",
    "DistPair",
    "pair_initial",
    "pair_append_bit",
    "dist_for",
    "c_value",
    "delta_at",
    "mass_at_least",
    "raw_moment",
    "blocks_count",
    "ones_blocks",
    "reverse_binary",
]


def _trailing_zeros(v: int) -> int:
    return (v & -v).bit_length() - 1


@dataclass(frozen=True)
class CarryDistribution:
    j_min: int
    nums: tuple[int, ...]
    tail: int
    exp: int
    t_bits: int = 0

    @classmethod
    def build(cls, j_min: int, nums, tail: int, exp: int, t_bits: int = 0) -> CarryDistribution:
        """Canonicalize and construct.

        ``nums[i]`` is the numerator of ``delta(j_min + i)`` and ``tail`` the
        numerator of ``delta(j_min - 1)``, all over ``2**exp``; the caller
        guarantees the values below ``j_min`` halve geometrically.
        """
        nums = list(nums)
        while len(nums) > 1 and nums[-1] == 0:
            nums.pop()
        # Absorb leading entries that continue the geometric tail, but keep
        # the topmost entry explicit.
        k = 0
        while k < len(nums) - 1 and nums[k] == 2 * tail:
            tail = nums[k]
            k += 1
        if k:
            nums = nums[k:]
            j_min += k
        acc = tail
        for v in nums:
            acc |= v
        if acc == 0:
            exp = 0
        elif exp:
            shift = min(_trailing_zeros(acc), exp)
            if shift:
                nums = [v >> shift for v in nums]
                tail >>= shift
                exp -= shift
        return cls(j_min, tuple(nums), tail, exp, t_bits)

    @property
    def j_max(self) -> int:
        return self.j_min + len(self.nums) - 1

    @property
    def support(self) -> dict[int, Dyadic]:
        return {self.j_min + i: Dyadic(v, self.exp) for i, v in enumerate(self.nums)}

    @property
    def tail_coeff(self) -> Dyadic:
        """``c`` with ``delta(j) = c * 2**j`` for every ``j < j_min``."""
        return Dyadic(self.tail, self.exp).ldexp(1 - self.j_min)

    def numerator_at(self, j: int, exp: int) -> int:
        """Numerator of ``delta(j)`` over ``2**exp``; ``exp`` must be large
        enough for the value to be exact."""
        shift = exp - self.exp
        if j >= self.j_min:
            i = j - self.j_min
            v = self.nums[i] if i < len(self.nums) else 0
            return v << shift
        depth = self.j_min - 1 - j
        if shift < depth:
            raise ValueError("exponent too small for an exact tail value")
        return self.tail << (shift - depth)

    def mass(self) -> Dyadic:
        # The tail below j_min sums to 2 * delta(j_min - 1).
        return Dyadic(sum(self.nums) + 2 * self.tail, self.exp)

    def to_json(self, t: int | None = None) -> dict:
        out = {}
        if t is not None:
            out["t"] = t
        out["support"] = {str(j): str(v) for j, v in self.support.items()}
        out["tail_coeff"] = str(self.tail_coeff)
        out["j_min"] = self.j_min
        return out


@dataclass(frozen=True)
class DistPair:
    lo: CarryDistribution
    hi: CarryDistribution
    prefix: int


_POINT_ZERO = CarryDistribution.build(0, (1,), 0, 0, 0)
# delta(j, 1) = 2**(j - 2) for j <= 1: explicit 1/2 at j = 1, 1/4 just below.
_GEOMETRIC_ONE = CarryDistribution.build(1, (2,), 1, 2, 1)


def pair_initial() -> DistPair:
    return DistPair(_POINT_ZERO, _GEOMETRIC_ONE, 0)


def _mix(lo: CarryDistribution, hi: CarryDistribution, t_bits: int) -> CarryDistribution:
    """``j -> lo(j - 1) / 2 + hi(j + 1) / 2``."""
    g = min(lo.j_min + 1, hi.j_min - 1)
    top = max(lo.j_max + 1, hi.j_max - 1)
    # Deepest tail positions read: lo at g - 2, hi at g.
    need_lo = max(0, (lo.j_min - 1) - (g - 2))
    need_hi = max(0, (hi.j_min - 1) - g)
    e = max(lo.exp + need_lo, hi.exp + need_hi)
    vals = [lo.numerator_at(j - 1, e) + hi.numerator_at(j + 1, e) for j in range(g - 1, top + 1)]
    return CarryDistribution.build(g, vals[1:], vals[0], e + 1, t_bits)


def pair_append_bit(p: DistPair, bit: int) -> DistPair:
    prefix = 2 * p.prefix + bit
    if bit == 0:
        mixed = _mix(p.lo, p.hi, (prefix + 1).bit_length())
        return DistPair(p.lo, mixed, prefix)
    if bit == 1:
        mixed = _mix(p.lo, p.hi, prefix.bit_length())
        return DistPair(mixed, p.hi, prefix)
    raise ValueError("bit must be 0 or 1")


def pair_for(t: int) -> DistPair:
    if t < 0:
        raise ValueError("t must be nonnegative")
    p = pair_initial()
    for ch in bin(t)[2:] if t else "":
        p = pair_append_bit(p, ch == "1")
    return p


@lru_cache(maxsize=4096)
def dist_for(t: int) -> CarryDistribution:
    """The exact distribution ``delta(., t)``."""
    return pair_for(t).lo


def delta_at(d: CarryDistribution, j: int) -> Dyadic:
    if j >= d.j_min:
        i = j - d.j_min
        return Dyadic(d.nums[i], d.exp) if i < len(d.nums) else Dyadic(0)
    return Dyadic(d.tail, d.exp + (d.j_min - 1 - j))


def mass_at_least(d: CarryDistribution, j0: int) -> Dyadic:
    """``sum(delta(j) for j >= j0)``."""
    start = max(j0 - d.j_min, 0)
    total = Dyadic(sum(d.nums[start:]), d.exp)
    n = d.j_min - j0  # tail terms at j_min - 1, ..., j0
    if n <= 0 or d.tail == 0:
        return total
    # tail * (1 + 1/2 + ... + 2**(1 - n)) = tail * (2**n - 1) / 2**(n - 1)
    return total + Dyadic(d.tail * ((1 << n) - 1), d.exp + n - 1)


def c_value(d: CarryDistribution) -> Dyadic:
    """``c_t = delta(0, t) + delta(1, t) + ...``."""
    return mass_at_least(d, 0)


@lru_cache(maxsize=None)
def _weighted_geometric(m: int) -> int:
    # S_m = sum_{i >= 0} i**m / 2**i satisfies S_m = sum_{l < m} C(m, l) S_l.
    if m == 0:
        return 2
    return sum(comb(m, l) * _weighted_geometric(l) for l in range(m))


def raw_moment(d: CarryDistribution, k: int) -> Dyadic:
    """``sum_j delta(j) * j**k`` including the geometric tail."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    finite = sum(v * (d.j_min + i) ** k for i, v in enumerate(d.nums))
    # Tail: delta(a - i) = tail / 2**i with a = j_min - 1, and
    # (a - i)**k = sum_m C(k, m) a**(k - m) (-i)**m.
    a = d.j_min - 1
    tail = sum(comb(k, m) * a ** (k - m) * (-1) ** m * _weighted_geometric(m) for m in range(k + 1))
    return Dyadic(finite + d.tail * tail, d.exp)


def ones_blocks(t: int) -> int:
    """Number of maximal runs of 1s in the binary expansion of ``t``."""
    if t < 0:
        _negative(t)
    bits = bin(t)[2:]
    return bits.count("01") + (bits[0] == "1")


def blocks_count(t: int) -> int:
    """Runs of 1s plus runs of 0s once trailing zeros are dropped."""
    if t < 0:
        _negative(t)
    if t == 0:
        return 0
    return 2 * ones_blocks(t) - 1


def reverse_binary(t: int) -> int:
    if t <= 0:
        raise ValueError("t must be positive to reverse its binary expansion")
    return int(bin(t)[:1:-1], 2)


def _negative(t):
    raise ValueError(f"expected a nonnegative integer, got {t}")
