"""Characteristic functions ``gamma_t(theta) = sum_j delta(j, t) e(j theta)``.

Two independent evaluations are provided: a product of 2x2 complex matrices
over the binary digits of ``t``, and a direct sum over the exact distribution.
On top of these sit the quadrature form of ``c_t``, the sine-cotangent
identity, and numerical checks of two bounds on ``gamma_t``.  Everything here
is double precision; exact claims live in :mod:`carrystat.carrydist` and
:mod:`carrystat.series`.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .carrydist import CarryDistribution, blocks_count
from .series import moments

__all__ = [
    "gamma_matrix",
    "gamma_from_dist",
    "ct_integral",
    "integral_identity_check",
    "norm_to_int",
    "muntjak_check",
    "modulus_bound",
    "imagpart_bound",
    "imagpart_bound_check",
    "CharfnRow",
    "charfn_rows",
    "charfn_csv",
]

TWO_PI = 2 * math.pi


def _e(x):
    return np.exp(1j * TWO_PI * np.asarray(x, dtype=float))


def gamma_matrix(t: int, theta):
    """``gamma_t(theta)`` via the digit-matrix product; ``theta`` may be an array."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    th = np.asarray(theta, dtype=float) % 1.0
    if t == 0:
        out = np.ones_like(th, dtype=complex)
        return out if out.ndim else complex(out)
    ep, em = _e(th) / 2, _e(-th) / 2
    u = ep / (1 - em)  # e(theta) / (2 - e(-theta))
    # Row vector (1, 0) times A(eps_0) ... A(eps_nu), least significant digit first.
    x = np.ones_like(th, dtype=complex)
    y = np.zeros_like(th, dtype=complex)
    while t:
        if t & 1:
            # A(1) = [[e/2, e(-)/2], [0, 1]]
            x, y = x * ep, x * em + y
        else:
            # A(0) = [[1, 0], [e/2, e(-)/2]]
            x, y = x + y * ep, y * em
        t >>= 1
    out = x + y * u
    return out if out.ndim else complex(out)


def gamma_from_dist(d: CarryDistribution, theta):
    """``gamma_t(theta)`` summed over an exact distribution, with the geometric
    tail in closed form."""
    th = np.asarray(theta, dtype=float) % 1.0
    scale = 2.0 ** -d.exp
    out = np.zeros_like(th, dtype=complex)
    for i, v in enumerate(d.nums):
        if v:
            out = out + (v * scale) * _e((d.j_min + i) * th)
    if d.tail:
        # sum_{i>=1} delta(j_min - i) e((j_min - i) theta), delta(j_min - 1) = tail * scale
        q = _e(-th) / 2
        out = out + (2 * d.tail * scale) * _e(d.j_min * th) * q / (1 - q)
    return out if out.ndim else complex(out)


def _midpoints(a: float, b: float, n: int) -> np.ndarray:
    h = (b - a) / n
    return a + h * (np.arange(n) + 0.5)


def _ct_integrand(t: int, th: np.ndarray) -> np.ndarray:
    return np.imag(gamma_matrix(t, th)) / np.tan(np.pi * th)


def ct_integral(t: int, quadrature_points: int = 1 << 14, full_interval: bool = False) -> float:
    """``c_t`` from ``1/2 + delta(0, t)/2 + 1/2 int_0^1 Im gamma_t cot(pi theta)``.

    The integrand is even about ``1/2``, so by default it is integrated on
    ``[0, 1/2]`` and doubled: midpoint rule on ``[d0, 1/2]`` with
    ``d0 = 1 / (8 n)``, plus ``d0`` times the removable limit at ``0``
    (which is ``2 * first moment = 0``).  ``delta(0, t)`` is itself obtained
    by quadrature of ``Re gamma_t`` over a full period.
    """
    n = int(quadrature_points)
    if n < 16:
        raise ValueError("quadrature_points must be >= 16")
    if t == 0:
        return 1.0
    delta0 = float(np.sum(np.real(gamma_matrix(t, _midpoints(0.0, 1.0, 2 * n))))) / (2 * n)
    if full_interval:
        th = _midpoints(0.0, 1.0, 2 * n)
        half_integral = float(np.sum(_ct_integrand(t, th))) / (2 * n) / 2
    else:
        d0 = 1.0 / (8 * n)
        th = _midpoints(d0, 0.5, n)
        # [0, d0] contributes d0 times the limit value 0
        half_integral = float(np.sum(_ct_integrand(t, th))) * (0.5 - d0) / n
    return 0.5 + delta0 / 2 + half_integral


def integral_identity_check(k: int, quadrature_points: int = 1 << 14) -> float:
    """Numerical ``int_0^1 sin(2 pi k theta) cot(pi theta) d theta`` (``1`` for ``k >= 1``)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return 0.0
    n = int(quadrature_points)
    if n < 16:
        raise ValueError("quadrature_points must be >= 16")
    d0 = 1.0 / (8 * n)
    th = _midpoints(d0, 0.5, n)
    body = float(np.sum(np.sin(TWO_PI * k * th) / np.tan(np.pi * th))) * (0.5 - d0) / n
    # removable limit 2k on [0, d0]; the integrand is even about 1/2
    return 2 * (body + 2 * k * d0)


def norm_to_int(theta: float) -> float:
    x = theta % 1.0
    return min(x, 1.0 - x)


def muntjak_check(t: int, theta: float, slack: float = 1e-12) -> bool:
    """``|gamma_t(theta)| <= (1 - ||theta||**2 / 2)**e`` with ``e = (r - 1) // 4``.

    Passes vacuously when ``e < 1``.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    return abs(gamma_matrix(t, theta)) <= modulus_bound(t, theta) + slack


def modulus_bound(t: int, theta: float) -> float:
    """Right-hand side of :func:`muntjak_check`; ``1`` when fewer than 5 blocks."""
    power = (blocks_count(t) - 1) // 4
    return (1 - norm_to_int(theta) ** 2 / 2) ** power if power >= 1 else 1.0


def imagpart_bound(t: int, theta: float, terms: int) -> float:
    """Right-hand side of the odd-moment expansion bound for ``|Im gamma_t(theta)|``,
    with ``terms`` odd moments and a Cauchy-Schwarz remainder."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    m = moments(t, 2 * terms + 2)
    x = TWO_PI * abs(theta)
    head = sum(x ** (2 * k + 1) * abs(float(m[2 * k + 1])) for k in range(terms))
    # sqrt((2n)! (2n+2)!) / (2n+1)! = sqrt((2n+2) / (2n+1))
    factor = math.sqrt((2 * terms + 2) / (2 * terms + 1))
    rest = x ** (2 * terms + 1) * factor * math.sqrt(float(m[2 * terms]) * float(m[2 * terms + 2]))
    return head + rest


def imagpart_bound_check(t: int, theta: float, terms: int, slack: float = 1e-10) -> bool:
    return abs(gamma_matrix(t, theta).imag) <= imagpart_bound(t, theta, terms) + slack


@dataclass(frozen=True)
class CharfnRow:
    t: int
    theta: float
    re: float
    im: float
    bound: float
    passed: bool


def charfn_rows(t: int, thetas) -> list[CharfnRow]:
    """One row per ``theta``: ``gamma_t`` and the block-count bound on its modulus."""
    rows = []
    for th in thetas:
        g = gamma_matrix(t, th)
        bound = modulus_bound(t, th)
        rows.append(CharfnRow(t, float(th), g.real, g.imag, bound, abs(g) <= bound + 1e-12))
    return rows


def charfn_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "theta", "re", "im", "bound", "pass"])
    for r in rows:
        w.writerow([r.t, repr(r.theta), repr(r.re), repr(r.im), repr(r.bound), int(r.passed)])
    return buf.getvalue()
