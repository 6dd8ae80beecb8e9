"""Exact carry statistics for binary addition.

``delta(j, t)`` is the density of ``n`` with ``s(n + t) - s(n) = j``, where
``s`` is the binary sum of digits; ``c_t`` is the density of ``j >= 0``.
"""

from .carrydist import (
    CarryDistribution,
    blocks_count,
    c_value,
    delta_at,
    dist_for,
    raw_moment,
    reverse_binary,
)
from .dyadic import Dyadic

__version__ = "0.1.0"

__all__ = [
    "CarryDistribution",
    "Dyadic",
    "blocks_count",
    "c_value",
    "delta_at",
    "dist_for",
    "raw_moment",
    "reverse_binary",
]
