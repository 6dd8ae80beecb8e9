import io
import json
import os

import pytest

from carrystat.carrydist import c_value, dist_for, reverse_binary
from carrystat.dyadic import Dyadic
from carrystat.scanner import (
    Layout,
    ScanConfig,
    ct_packed,
    ct_table,
    read_checkpoint,
    scan_min_ct,
    verify_conjecture_range,
)

MIN_T = 0b111101111011110111101111011111
MIN_CT = Dyadic(18169025645289, 45)


def _naive_min(bits):
    values = {t: c_value(dist_for(t)) for t in range(1, 1 << bits)}
    best = min(values.values())
    return best, sorted(t for t, v in values.items() if v == best)


def test_incremental_matches_direct():
    table = ct_table(12)
    for t in range(1 << 12):
        assert table[t] == c_value(dist_for(t))


def test_packed_minimum_value():
    assert ct_packed(MIN_T, 30) == MIN_CT
    assert ct_packed(reverse_binary(MIN_T)) == MIN_CT
    assert ct_packed(1) == Dyadic(3, 2)


def test_bits_one():
    res = scan_min_ct(ScanConfig(1))
    assert res.min_ct == Dyadic(3, 2) and res.argmin_set == [1]
    assert verify_conjecture_range(1) == 0


@pytest.mark.parametrize("bits", [4, 8, 12])
def test_exact_scan_matches_naive(bits):
    best, where = _naive_min(bits)
    res = scan_min_ct(ScanConfig(bits))
    assert res.min_ct == best
    assert res.argmin_set == where
    assert res.count_below_half == 0


@pytest.mark.parametrize("bits", [6, 10, 14])
def test_float_scan_matches_exact(bits):
    exact = scan_min_ct(ScanConfig(bits))
    approx = scan_min_ct(ScanConfig(bits, mode="float"))
    assert approx.min_ct == exact.min_ct
    assert approx.argmin_set == exact.argmin_set
    # the float minimum is within its radius of the exact one
    assert abs(approx.float_min - float(exact.min_ct)) <= approx.radius


@pytest.mark.parametrize("bits", [9, 13, 16])
def test_argmin_closed_under_reversal(bits):
    res = scan_min_ct(ScanConfig(bits))
    found = set(res.argmin_set)
    for t in found:
        r = reverse_binary(t)
        if r.bit_length() == t.bit_length():
            assert r in found


def test_sixteen_bits_no_violations():
    assert verify_conjecture_range(16) == 0


def test_determinism_across_threads_and_splits():
    base = scan_min_ct(ScanConfig(14, threads=1)).to_json()
    for cfg in (ScanConfig(14, threads=2), ScanConfig(14, split=3), ScanConfig(14, split=13, threads=2)):
        out = scan_min_ct(cfg).to_json()
        for key in ("min_ct", "argmin_set", "count_below_half", "evaluated_odd"):
            assert out[key] == base[key]


def test_checkpoint_resume(tmp_path):
    path = str(tmp_path / "scan.ckpt")
    full = scan_min_ct(ScanConfig(12, checkpoint_path=path, split=6)).to_json()
    header, records = read_checkpoint(path)
    assert header["bits"] == 12 and len(records) == 64
    # tear the last record, then resume
    size = os.path.getsize(path)
    with open(path, "r+b") as fh:
        fh.truncate(size - 5)
    assert len(read_checkpoint(path)[1]) == 63
    resumed = scan_min_ct(ScanConfig(12, checkpoint_path=path, split=6)).to_json()
    assert resumed["min_ct"] == full["min_ct"] and resumed["argmin_set"] == full["argmin_set"]
    assert len(read_checkpoint(path)[1]) == 64


def test_checkpoint_config_mismatch(tmp_path):
    path = str(tmp_path / "scan.ckpt")
    scan_min_ct(ScanConfig(10, checkpoint_path=path, split=4))
    with pytest.raises(ValueError):
        scan_min_ct(ScanConfig(11, checkpoint_path=path, split=4))


def test_checkpoint_bad_magic(tmp_path):
    path = tmp_path / "junk.ckpt"
    path.write_bytes(b"not a checkpoint at all")
    with pytest.raises(ValueError):
        read_checkpoint(str(path))


def test_stream_lines():
    buf = io.StringIO()
    scan_min_ct(ScanConfig(8, split=3), stream=buf)
    lines = [json.loads(x) for x in buf.getvalue().splitlines()]
    assert len(lines) == 8 and {"prefix", "result"} <= set(lines[0])


def test_config_validation():
    with pytest.raises(ValueError):
        ScanConfig(0)
    with pytest.raises(ValueError):
        ScanConfig(8, mode="fast")


def test_low_precision_is_detected():
    with pytest.raises(ValueError):
        Layout(12, precision_bits=8)
    lay = Layout(12, precision_bits=20)
    with pytest.raises(ArithmeticError):
        for t in range(1, 1 << 12):
            lay.pair_for(t)
