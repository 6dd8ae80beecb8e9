"""Exhaustive minimum search for ``c_t`` over ``1 <= t < 2**bits``.

Every binary prefix ``t`` owns the pair ``(delta(., t), delta(., t + 1))``;
its children are ``2t -> (lo, mix)`` and ``2t + 1 -> (mix, hi)`` where
``mix(j) = lo(j - 1)/2 + hi(j + 1)/2``.  One mix per internal node therefore
yields every distribution, and because ``c_{2t} = c_t`` only odd ``t`` need
evaluating.

Exact mode packs a whole distribution into one Python integer: lane ``i``
(``width`` bits) holds the numerator of ``delta(jb + i)`` over the fixed
denominator ``2**precision``.  A mix is then two shifts, two adds and one halving of
that integer.  The lowest lane sits inside the geometric tail, so the value
one step below it is half the lane.  Every step verifies that nothing was
rounded or spilled, so the result is exact or an ``ArithmeticError``.

Float mode runs the same recurrence in numpy, level by level, and certifies
its answers with an explicit error radius plus exact re-checks.
"""

from __future__ import annotations

import json
import os
import struct
import sys
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .carrydist import c_value, dist_for
from .dyadic import Dyadic

__all__ = [
    "ScanConfig",
    "ScanResult",
    "Layout",
    "scan_min_ct",
    "verify_conjecture_range",
    "ct_table",
    "ct_packed",
    "read_checkpoint",
    "default_threads",
]

CHECKPOINT_MAGIC = b"CSTCKPT\0"
CHECKPOINT_VERSION = 1
_HEADER = struct.Struct("<HHBHI")  # version, bits, mode, split, precision
_MODES = {"exact": 0, "float": 1}


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("CARRYSTAT_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class ScanConfig:
    bits: int
    mode: str = "exact"
    tail_cut: int = -48
    threads: int = field(default_factory=default_threads)
    checkpoint_path: str | None = None
    split: int | None = None
    precision_bits: int | None = None  # defaults to 3 bits + 24
    progress: bool = False

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("bits must be >= 1")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {sorted(_MODES)}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.split is None:
            self.split = min(self.bits - 1, 12)
        if not 0 <= self.split <= self.bits - 1:
            raise ValueError("split must lie in [0, bits - 1]")

    def to_json(self) -> dict:
        return {
            "bits": self.bits,
            "mode": self.mode,
            "tail_cut": self.tail_cut,
            "threads": self.threads,
            "checkpoint_path": self.checkpoint_path,
            "split": self.split,
            "precision_bits": self.layout().precision,
        }

    def layout(self) -> Layout:
        return Layout(self.bits, self.precision_bits)


@dataclass
class ScanResult:
    bits: int
    mode: str
    min_ct: Dyadic
    argmin_set: list
    count_below_half: int
    evaluated: int
    float_min: float | None = None
    radius: float | None = None
    rechecked: int = 0
    elapsed: float = 0.0

    def to_json(self) -> dict:
        out = {
            "bits": self.bits,
            "mode": self.mode,
            "min_ct": str(self.min_ct),
            "decimal": self.min_ct.to_exact_decimal(),
            "argmin_set": list(self.argmin_set),
            "argmin_binary": [bin(t)[2:] for t in self.argmin_set],
            "count_below_half": self.count_below_half,
            "evaluated_odd": self.evaluated,
        }
        if self.mode == "float":
            out.update({"float_min": self.float_min, "radius": self.radius, "rechecked_exactly": self.rechecked})
        return out


# -- exact packed kernel -------------------------------------------------------


class Layout:
    """Lane geometry for scans below ``2**bits``."""

    def __init__(self, bits: int, precision_bits: int | None = None):
        self.bits = bits
        self.precision = 3 * bits + 24 if precision_bits is None else precision_bits
        if self.precision < bits + 4:
            # the start state already needs 2**(-bits - 4)
            raise ValueError(f"precision_bits must be at least bits + 4 = {bits + 4}")
        self.width = self.precision + 3
        # delta(., t) has j_min >= 2 - bitlen(t); the pair reaches bitlen bits + 1.
        self.jb = -(bits + 2)
        self.jt = bits + 1
        self.n = self.jt - self.jb + 1
        self.lane0 = (1 << self.width) - 1
        self.lowmask = sum(1 << (self.width * i) for i in range(self.n))
        self.top_shift = self.width * self.n
        self.zero_shift = self.width * (-self.jb)
        self.one = 1 << self.precision

    def mix(self, lo: int, hi: int) -> int:
        if lo & 1:
            raise ArithmeticError("lowest lane is odd; increase precision_bits")
        x = (lo << self.width) + (hi >> self.width) + ((lo & self.lane0) >> 1)
        if x & self.lowmask or x >> self.top_shift:
            raise ArithmeticError("inexact halving or lane overflow; increase precision_bits")
        return x >> 1

    def c_num(self, x: int) -> int:
        """Numerator over ``2**precision`` of ``sum_{j >= 0} delta(j)``."""
        return (x >> self.zero_shift) % self.lane0

    def initial(self) -> tuple[int, int]:
        lo = self.one << (self.width * (0 - self.jb))
        hi = 0
        for j in range(self.jb, 2):  # delta(j, 1) = 2**(j - 2)
            hi |= (1 << (self.precision + j - 2)) << (self.width * (j - self.jb))
        return lo, hi

    def pair_for(self, t: int) -> tuple[int, int]:
        lo, hi = self.initial()
        for ch in bin(t)[2:] if t else "":
            m = self.mix(lo, hi)
            lo, hi = (m, hi) if ch == "1" else (lo, m)
        return lo, hi

    def lanes(self, x: int) -> list[int]:
        return [(x >> (self.width * i)) & self.lane0 for i in range(self.n)]

    def to_float_rows(self, x: int, window_lo: int) -> np.ndarray:
        """Values on ``[window_lo, jt]`` as doubles (lanes below ``jb`` extended geometrically)."""
        lanes = self.lanes(x)
        scale = 2.0 ** -self.precision
        out = np.empty(self.jt - window_lo + 1)
        for j in range(window_lo, self.jt + 1):
            if j >= self.jb:
                out[j - window_lo] = lanes[j - self.jb] * scale
            else:
                out[j - window_lo] = lanes[0] * scale * 2.0 ** (j - self.jb)
        return out


def ct_packed(t: int, bits: int | None = None) -> Dyadic:
    """``c_t`` through the packed kernel alone."""
    if t < 1:
        return Dyadic(1)
    lay = Layout(bits or t.bit_length())
    lo, _ = lay.pair_for(t)
    return Dyadic(lay.c_num(lo), lay.precision)


@dataclass
class _Partial:
    min_num: int | None = None
    argmin: list = field(default_factory=list)  # odd t only
    below_half: list = field(default_factory=list)  # odd t only
    evaluated: int = 0

    def note(self, t: int, num: int, half: int) -> None:
        self.evaluated += 1
        if self.min_num is None or num < self.min_num:
            self.min_num, self.argmin = num, [t]
        elif num == self.min_num:
            self.argmin.append(t)
        if num <= half:
            self.below_half.append(t)

    def merge(self, other: _Partial) -> None:
        self.evaluated += other.evaluated
        self.below_half += other.below_half
        if other.min_num is None:
            return
        if self.min_num is None or other.min_num < self.min_num:
            self.min_num, self.argmin = other.min_num, list(other.argmin)
        elif other.min_num == self.min_num:
            self.argmin += other.argmin

    def to_json(self) -> dict:
        return {
            "min_num_hex": None if self.min_num is None else hex(self.min_num),
            "argmin": self.argmin,
            "below_half": self.below_half,
            "evaluated": self.evaluated,
        }

    @classmethod
    def from_json(cls, obj: dict) -> _Partial:
        m = obj["min_num_hex"]
        return cls(None if m is None else int(m, 16), list(obj["argmin"]), list(obj["below_half"]), obj["evaluated"])


def _walk_exact(lay: Layout, t: int, lo: int, hi: int, limit: int, acc: _Partial, stop_at: int | None = None, roots=None):
    """Depth-first over the subtree at ``t``; descendants ``>= stop_at`` become ``roots``."""
    half = lay.one >> 1
    stack = [(t, lo, hi)]
    mix, c_num, note = lay.mix, lay.c_num, acc.note
    while stack:
        t, lo, hi = stack.pop()
        if stop_at is not None and t >= stop_at:
            roots.append((t, lo, hi))
            continue
        if t & 1:
            note(t, c_num(lo), half)
        if 2 * t < limit:
            m = mix(lo, hi)
            stack.append((2 * t + 1, m, hi))
            stack.append((2 * t, lo, m))


def ct_table(bits: int) -> list[Dyadic]:
    """``c_t`` for every ``0 <= t < 2**bits`` from the packed traversal."""
    lay = Layout(bits)
    out = [Dyadic(1)] * (1 << bits)
    lo, hi = lay.pair_for(1)
    stack = [(1, lo, hi)]
    limit = 1 << bits
    while stack:
        t, lo, hi = stack.pop()
        out[t] = Dyadic(lay.c_num(lo), lay.precision) if t & 1 else out[t >> 1]
        if 2 * t < limit:
            m = lay.mix(lo, hi)
            stack.append((2 * t + 1, m, hi))
            stack.append((2 * t, lo, m))
    return out


# -- float kernel --------------------------------------------------------------

_ROW_CAP = 1 << 16


class _FloatKernel:
    def __init__(self, lay: Layout, tail_cut: int):
        self.lay = lay
        self.window_lo = min(tail_cut, 0)
        self.closure = tail_cut <= lay.jb
        self.n = lay.jt - self.window_lo + 1
        self.zero = -self.window_lo

    def mix(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        out = np.empty_like(lo)
        out[:, 1:] = lo[:, :-1]
        out[:, 0] = lo[:, 0] * 0.5 if self.closure else 0.0
        out[:, :-1] += hi[:, 1:]
        out *= 0.5
        return out

    def radius(self, depth: int) -> float:
        return self.n * (depth + 2) * 2.0**-52


def _walk_float(kern: _FloatKernel, ts: np.ndarray, LO: np.ndarray, HI: np.ndarray, depth: int, limit: int, out: list):
    """Level-synchronous traversal; appends ``(t, c_lower, c_upper)`` rows for odd ``t``."""
    odd = (ts & 1) == 1
    if odd.any():
        rows = LO[odd]
        c = rows[:, kern.zero:].sum(axis=1)
        lost = np.maximum(1.0 - rows.sum(axis=1), 0.0)
        rad = kern.radius(depth)
        out.append((ts[odd], c - rad, c + lost + rad))
    grow = 2 * ts < limit
    if not grow.any():
        return
    ts, LO, HI = ts[grow], LO[grow], HI[grow]
    if 2 * len(ts) > _ROW_CAP:
        # Keep at most _ROW_CAP rows alive per level by descending in halves.
        mid = len(ts) // 2
        for sl in (slice(0, mid), slice(mid, None)):
            _descend(kern, ts[sl], LO[sl], HI[sl], depth, limit, out)
        return
    _descend(kern, ts, LO, HI, depth, limit, out)


def _descend(kern, ts, LO, HI, depth, limit, out):
    mid = kern.mix(LO, HI)
    nts = np.concatenate([2 * ts, 2 * ts + 1])
    nLO = np.concatenate([LO, mid])
    nHI = np.concatenate([mid, HI])
    _walk_float(kern, nts, nLO, nHI, depth + 1, limit, out)


# -- subtree tasks ---------------------------------------------------------------


def _exact_task(args):
    bits, precision, t, lo, hi = args
    lay = Layout(bits, precision)
    acc = _Partial()
    _walk_exact(lay, t, lo, hi, 1 << bits, acc)
    return t, acc


def _float_task(args):
    bits, precision, tail_cut, t, lo, hi = args
    lay = Layout(bits, precision)
    kern = _FloatKernel(lay, tail_cut)
    LO = lay.to_float_rows(lo, kern.window_lo)[None, :]
    HI = lay.to_float_rows(hi, kern.window_lo)[None, :]
    rows = []
    _walk_float(kern, np.array([t], dtype=np.int64), LO, HI, t.bit_length(), 1 << bits, rows)
    ts = np.concatenate([r[0] for r in rows]) if rows else np.zeros(0, dtype=np.int64)
    lower = np.concatenate([r[1] for r in rows]) if rows else np.zeros(0)
    upper = np.concatenate([r[2] for r in rows]) if rows else np.zeros(0)
    if len(ts) == 0:
        return t, {"best_upper": None, "candidates": [], "near": [], "evaluated": 0, "float_min": None, "radius": 0.0}
    best_upper = float(upper.min())
    keep = lower <= best_upper
    cand = [[int(a), float(b)] for a, b in zip(ts[keep], lower[keep])]
    near = ts[lower <= 0.5]
    i = int(np.argmin(upper))
    return t, {
        "best_upper": best_upper,
        "candidates": cand,
        "near": [int(x) for x in near],
        "evaluated": int(len(ts)),
        "float_min": float((lower[i] + upper[i]) / 2),
        "radius": float(kern.radius(bits)),
    }


# -- checkpoint file -------------------------------------------------------------


def _write_header(fh, cfg: ScanConfig, precision: int) -> None:
    fh.write(CHECKPOINT_MAGIC)
    fh.write(_HEADER.pack(CHECKPOINT_VERSION, cfg.bits, _MODES[cfg.mode], cfg.split, precision))
    fh.flush()


def read_checkpoint(path: str) -> tuple[dict, list[dict]]:
    """Header fields and the intact records; a truncated final record is ignored."""
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(CHECKPOINT_MAGIC):
        raise ValueError(f"{path}: not a checkpoint file")
    pos = len(CHECKPOINT_MAGIC)
    if len(data) < pos + _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    version, bits, mode, split, precision = _HEADER.unpack_from(data, pos)
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    pos += _HEADER.size
    header = {"version": version, "bits": bits, "mode": mode, "split": split, "precision": precision}
    records = []
    while pos + 4 <= len(data):
        (length,) = struct.unpack_from("<I", data, pos)
        end = pos + 4 + length + 4
        if end > len(data):
            break
        payload = data[pos + 4 : pos + 4 + length]
        (crc,) = struct.unpack_from("<I", data, pos + 4 + length)
        if zlib.crc32(payload) != crc:
            break
        records.append(json.loads(payload))
        pos = end
    return header, records


def _append_record(fh, record: dict) -> None:
    payload = json.dumps(record, separators=(",", ":")).encode()
    fh.write(struct.pack("<I", len(payload)) + payload + struct.pack("<I", zlib.crc32(payload)))
    fh.flush()


def _open_checkpoint(cfg: ScanConfig, precision: int):
    """Completed records keyed by prefix, plus an append handle."""
    path = cfg.checkpoint_path
    done = {}
    if os.path.exists(path) and os.path.getsize(path) > 0:
        header, records = read_checkpoint(path)
        want = {"bits": cfg.bits, "mode": _MODES[cfg.mode], "split": cfg.split, "precision": precision}
        if any(header[k] != v for k, v in want.items()):
            raise ValueError(f"{path}: checkpoint belongs to a different scan configuration")
        done = {r["prefix"]: r for r in records}
        # Rewrite only the intact part so a torn tail does not stick around.
        with open(path, "r+b") as fh:
            size = len(CHECKPOINT_MAGIC) + _HEADER.size
            for r in records:
                size += 8 + len(json.dumps(r, separators=(",", ":")).encode())
            fh.truncate(size)
        fh = open(path, "ab")
    else:
        fh = open(path, "wb")
        _write_header(fh, cfg, precision)
    return done, fh


# -- driver ----------------------------------------------------------------------


def _run_tasks(fn, tasks, threads):
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            yield from pool.map(fn, tasks, chunksize=max(1, len(tasks) // (threads * 8)))
    else:
        yield from map(fn, tasks)


def _even_multiples(ts, bits: int) -> list[int]:
    limit = 1 << bits
    out = []
    for t in ts:
        while t < limit:
            out.append(t)
            t <<= 1
    return sorted(out)


def scan_min_ct(config: ScanConfig, stream=None) -> ScanResult:
    """Minimum of ``c_t`` over ``1 <= t < 2**bits`` and the ``t`` attaining it.

    ``stream``, if given, receives one JSON object per finished subtree.
    """
    start = time.monotonic()
    lay = config.layout()
    limit = 1 << config.bits
    stop = 1 << config.split
    top = _Partial()
    roots: list = []
    lo, hi = lay.pair_for(1)
    _walk_exact(lay, 1, lo, hi, limit, top, stop_at=stop, roots=roots)
    roots.sort()

    done, fh = ({}, None)
    if config.checkpoint_path:
        done, fh = _open_checkpoint(config, lay.precision)
    try:
        if config.mode == "exact":
            result = _finish_exact(config, lay, top, roots, done, fh, stream)
        else:
            result = _finish_float(config, lay, top, roots, done, fh, stream)
    finally:
        if fh is not None:
            fh.close()
    result.elapsed = time.monotonic() - start
    return result


def _progress(config: ScanConfig, i: int, n: int) -> None:
    if config.progress and (i == n or i % max(1, n // 20) == 0):
        print(f"[scan] {i}/{n} subtrees", file=sys.stderr, flush=True)


def _finish_exact(config, lay, acc, roots, done, fh, stream) -> ScanResult:
    pending = [(config.bits, lay.precision, t, lo, hi) for t, lo, hi in roots if t not in done]
    for r in done.values():
        acc.merge(_Partial.from_json(r["result"]))
    state = {t: (lo, hi) for t, lo, hi in roots}
    for i, (t, part) in enumerate(_run_tasks(_exact_task, pending, config.threads), 1):
        acc.merge(part)
        record = {"prefix": t, "result": part.to_json()}
        if fh is not None:
            lo, hi = state[t]
            _append_record(fh, record | {"lo_hex": hex(lo), "hi_hex": hex(hi)})
        if stream is not None:
            stream.write(json.dumps(record, separators=(",", ":")) + "\n")
        _progress(config, i, len(pending))
    below = _even_multiples(sorted(set(acc.below_half)), config.bits)
    return ScanResult(
        config.bits,
        "exact",
        Dyadic(acc.min_num, lay.precision),
        _even_multiples(sorted(set(acc.argmin)), config.bits),
        len(below),
        acc.evaluated,
    )


def _finish_float(config, lay, top, roots, done, fh, stream) -> ScanResult:
    pending = [(config.bits, lay.precision, config.tail_cut, t, lo, hi) for t, lo, hi in roots if t not in done]
    parts = [r["result"] for r in done.values()]
    state = {t: (lo, hi) for t, lo, hi in roots}
    for i, (t, part) in enumerate(_run_tasks(_float_task, pending, config.threads), 1):
        parts.append(part)
        record = {"prefix": t, "result": part}
        if fh is not None:
            lo, hi = state[t]
            _append_record(fh, record | {"lo_hex": hex(lo), "hi_hex": hex(hi)})
        if stream is not None:
            stream.write(json.dumps(record, separators=(",", ":")) + "\n")
        _progress(config, i, len(pending))
    # The top of the tree was already evaluated exactly.
    half = Fraction(1, 2)
    best_upper = float(Fraction(top.min_num, 1 << lay.precision)) if top.min_num is not None else None
    for p in parts:
        if p["best_upper"] is not None and (best_upper is None or p["best_upper"] < best_upper):
            best_upper = p["best_upper"]
    candidates = set(top.argmin)
    near = set()
    for p in parts:
        # Subtrees report candidates against their own best; keep only those
        # that can still beat the global one.
        candidates.update(t for t, lower in p["candidates"] if lower <= best_upper)
        near.update(p["near"])
    exact = {t: c_value(dist_for(t)) for t in sorted(candidates | near)}
    dist_for.cache_clear()
    min_ct = min(exact.values()) if exact else Dyadic(1)
    argmin = sorted(t for t, c in exact.items() if c == min_ct)
    below = sorted(set(top.below_half) | {t for t in near if exact[t].as_fraction() <= half})
    fmin = min((p["float_min"] for p in parts if p["float_min"] is not None), default=None)
    radius = max((p["radius"] for p in parts), default=0.0)
    evaluated = top.evaluated + sum(p["evaluated"] for p in parts)
    return ScanResult(
        config.bits,
        "float",
        min_ct,
        _even_multiples(argmin, config.bits),
        len(_even_multiples(below, config.bits)),
        evaluated,
        float_min=fmin if fmin is not None else float(min_ct),
        radius=radius,
        rechecked=len(exact),
    )


def verify_conjecture_range(bits: int, mode: str = "exact", threads: int | None = None) -> int:
    """Number of ``1 <= t < 2**bits`` with ``c_t <= 1/2`` (expected 0)."""
    cfg = ScanConfig(bits, mode, threads=threads or default_threads())
    return scan_min_ct(cfg).count_below_half
