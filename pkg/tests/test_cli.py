import csv
import io
import json
import subprocess
import sys

import pytest

from carrystat.cli import run


def _json(capsys, argv, code=0):
    assert run(argv) == code
    return json.loads(capsys.readouterr().out)


def test_ct_examples(capsys):
    doc = _json(capsys, ["ct", "1"])
    assert (doc["t"], doc["ct"], doc["decimal"]) == (1, "3/2^2", "0.75")
    doc = _json(capsys, ["ct", "0"])
    assert doc["ct"] == "1/2^0" and "decimal" not in doc


def test_blocks_example(capsys):
    doc = _json(capsys, ["blocks", "0"])
    assert doc["t"] == 0 and doc["r"] == 0


def test_hex_and_binary_input(capsys):
    a = _json(capsys, ["ct", "0x2d"])
    b = _json(capsys, ["ct", "0b101101"])
    c = _json(capsys, ["ct", "45"])
    assert a["ct"] == b["ct"] == c["ct"]


def test_density_negative_range(capsys):
    doc = _json(capsys, ["density", "5", "--j", "-3..2"])
    assert doc["values"]["-3"] == "3/2^6" and doc["values"]["2"] == "1/2^2"


def test_csv_output(capsys):
    assert run(["ct", "5", "--format", "csv"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows == [["t", "ct", "decimal"], ["5", "5/2^3", "0.625"]]


def test_exit_codes(capsys):
    assert run(["ct", "-1"]) == 2
    assert run(["no-such-command"]) == 2
    assert run(["verify-bounds", "6"]) == 1
    assert run(["verify-bounds", "6", "--convention", "expansion"]) == 0
    assert run(["verify-bounds", "7"]) == 0
    capsys.readouterr()


def test_scan_and_verify(capsys):
    doc = _json(capsys, ["scan", "--bits", "8"])
    assert doc["count_below_half"] == 0
    assert run(["verify", "--bits", "10"]) == 0
    capsys.readouterr()


@pytest.mark.parametrize(
    "argv",
    [
        ["ct", "77"],
        ["moments", "13", "--kmax", "6"],
        ["charfn", "21", "--theta", "0.5", "0.1"],
        ["scan", "--bits", "9", "--mode", "float"],
        ["verify-bounds", "6"],
    ],
)
def test_replay_is_byte_identical(tmp_path, capsys, argv):
    out = tmp_path / "out.json"
    first = run(argv + ["--output", str(out)])
    again = tmp_path / "again.json"
    assert run(["replay", str(out), "--output", str(again)]) == first
    assert out.read_text() == again.read_text()
    capsys.readouterr()


def test_replay_missing_file(capsys):
    assert run(["replay", "/nonexistent/file.json"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "carrystat", "ct", "3"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["t"] == 3
