"""Brute-force ground truth for ``delta(j, t)`` and ``c_t``.

Write ``n = q * 2**m + u`` with ``0 <= u < 2**m`` and ``2**m > t``.  Adding
``t`` either leaves ``q`` alone (``u + t < 2**m``) or carries once into it.
A carry turns ``s(q + 1) - s(q)`` into ``1 - nu_2(q + 1)``, and as ``q``
ranges over the integers the trailing-ones count ``k = nu_2(q + 1)`` takes
each value with density ``2**(-k - 1)``.  Enumerating the ``2**m`` residues
therefore gives exact densities with no truncation.

Nothing here touches the digit recurrence used by :mod:`carrystat.carrydist`.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

from .dyadic import Dyadic

__all__ = [
    "OracleResult",
    "sum_of_digits",
    "default_modulus_bits",
    "exact_delta",
    "exact_c",
    "empirical_delta",
]


@dataclass(frozen=True)
class OracleResult:
    value: Dyadic
    modulus_bits: int
    method: str  # "exact_residue" or "empirical"
    samples: int | None = None


def sum_of_digits(n: int) -> int:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return bin(n).count("1")


def default_modulus_bits(t: int) -> int:
    return t.bit_length() + 2


def _check_modulus(t: int, m: int) -> None:
    if t < 0:
        raise ValueError("t must be nonnegative")
    if m < 0 or (1 << m) <= t:
        raise ValueError(f"need 2**m > t, got m={m} for t={t}")


@lru_cache(maxsize=1024)
def _residue_profile(t: int, m: int) -> tuple[Counter, Counter]:
    """Histograms over residues ``u``: digit-sum change without carry, and
    ``s(u + t - 2**m) - s(u) + 1`` for residues that carry."""
    top = 1 << m
    plain: Counter = Counter()
    carried: Counter = Counter()
    for u in range(top):
        v = u + t
        if v < top:
            plain[sum_of_digits(v) - sum_of_digits(u)] += 1
        else:
            carried[sum_of_digits(v - top) - sum_of_digits(u) + 1] += 1
    return plain, carried


def exact_delta(t: int, j: int, m: int | None = None) -> Dyadic:
    if m is None:
        m = default_modulus_bits(t)
    _check_modulus(t, m)
    plain, carried = _residue_profile(t, m)
    total = Dyadic(plain.get(j, 0), m)
    for d, count in carried.items():
        k = d - j  # required trailing-ones count of q
        if k >= 0:
            total += Dyadic(count, m + k + 1)
    return total


def exact_c(t: int, m: int | None = None) -> Dyadic:
    if m is None:
        m = default_modulus_bits(t)
    _check_modulus(t, m)
    plain, carried = _residue_profile(t, m)
    total = Dyadic(sum(c for d, c in plain.items() if d >= 0), m)
    for d, count in carried.items():
        if d >= 0:
            # sum_{k=0}^{d} 2**(-k-1) = 1 - 2**(-d-1)
            total += Dyadic(count * ((1 << (d + 1)) - 1), m + d + 1)
    return total


def empirical_delta(t: int, j: int, n_samples: int) -> Dyadic:
    """Frequency of ``s(n + t) - s(n) = j`` over ``0 <= n < n_samples``."""
    if n_samples < 1 or n_samples & (n_samples - 1):
        raise ValueError("n_samples must be a power of two")
    hits = sum(1 for n in range(n_samples) if sum_of_digits(n + t) - sum_of_digits(n) == j)
    return Dyadic(hits, n_samples.bit_length() - 1)
