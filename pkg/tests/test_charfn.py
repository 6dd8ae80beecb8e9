import cmath
import csv
import io
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carrystat.carrydist import blocks_count, c_value, dist_for, reverse_binary
from carrystat.charfn import (
    charfn_csv,
    charfn_rows,
    ct_integral,
    gamma_from_dist,
    gamma_matrix,
    imagpart_bound,
    imagpart_bound_check,
    integral_identity_check,
    modulus_bound,
    muntjak_check,
    norm_to_int,
)

thetas = st.floats(0, 1, allow_nan=False)
ts = st.integers(0, (1 << 24) - 1)


def _e(x):
    return cmath.exp(2j * math.pi * x)


def test_gamma_examples():
    for t in (0, 1, 5, 12345):
        assert abs(gamma_matrix(t, 0.0) - 1) < 1e-15
    for th in (0.1, 0.25, 0.7):
        u = _e(th) / (2 - _e(-th))
        assert abs(gamma_matrix(1, th) - u) < 1e-15
        assert abs(gamma_matrix(2, th) - gamma_matrix(1, th)) < 1e-15
        assert abs(gamma_from_dist(dist_for(0), th) - 1) < 1e-15


def test_gamma_vectorized():
    grid = np.linspace(0, 1, 33)
    vec = gamma_matrix(0b101101, grid)
    assert vec.shape == grid.shape
    assert all(abs(vec[i] - gamma_matrix(0b101101, float(x))) < 1e-15 for i, x in enumerate(grid))
    with pytest.raises(ValueError):
        gamma_matrix(-1, 0.1)


def test_representations_agree():
    rng = random.Random(11)
    for _ in range(100):
        t, th = rng.randrange(1 << 16), rng.random()
        assert abs(gamma_matrix(t, th) - gamma_from_dist(dist_for(t), th)) < 1e-12


@settings(max_examples=200)
@given(ts, thetas)
def test_modulus_at_most_one(t, th):
    assert abs(gamma_matrix(t, th)) <= 1 + 1e-12


@settings(max_examples=100)
@given(ts, thetas)
def test_conjugate_symmetry(t, th):
    assert abs(gamma_matrix(t, 1 - th) - gamma_matrix(t, th).conjugate()) < 1e-12


@settings(max_examples=100)
@given(st.integers(1, (1 << 24) - 1), thetas)
def test_reversal_modulus(t, th):
    assert abs(abs(gamma_matrix(t, th)) - abs(gamma_matrix(reverse_binary(t), th))) < 1e-12


def test_ct_integral_examples():
    assert abs(ct_integral(1) - 0.75) < 1e-8
    assert abs(ct_integral(0) - 1) < 1e-8
    full = ct_integral(77, 1 << 12, full_interval=True)
    assert abs(full - float(c_value(dist_for(77)))) < 1e-6
    with pytest.raises(ValueError):
        ct_integral(3, 8)


def test_ct_integral_converges():
    rng = random.Random(4)
    for t in [1, 3, 77] + [rng.randrange(1, 1 << 16) for _ in range(10)]:
        exact = float(c_value(dist_for(t)))
        errors = [abs(ct_integral(t, n) - exact) for n in (16, 32, 64, 128, 256, 512, 1024)]
        assert all(b < a for a, b in zip(errors, errors[1:])), t


def test_integral_identity():
    assert abs(integral_identity_check(1) - 1) < 1e-8
    assert abs(integral_identity_check(10) - 1) < 1e-7
    assert integral_identity_check(0) == 0


def test_cot_estimate_on_grid():
    th = np.linspace(1e-6, 0.5, 20001)
    assert np.all(1 / np.tan(np.pi * th) <= 1 / (np.pi * th))
    assert np.all(1 / (np.pi * th) <= 1 / th)


def test_muntjak_examples():
    t = 0b10101  # five blocks
    assert blocks_count(t) == 5
    assert abs(gamma_matrix(t, 0.5)) <= 7 / 8
    assert modulus_bound(t, 0.5) == 7 / 8
    assert muntjak_check(t, 0.5) and muntjak_check(t, 0.0)
    assert norm_to_int(0.75) == 0.25
    with pytest.raises(ValueError):
        muntjak_check(0, 0.3)


@settings(max_examples=200)
@given(st.integers(1, (1 << 24) - 1), thetas)
def test_muntjak_property(t, th):
    assert muntjak_check(t, th)


def test_imagpart_examples():
    assert imagpart_bound_check(1, 0.0, 2)
    assert imagpart_bound(1, 0.0, 2) == 0
    assert imagpart_bound_check(1, 0.01, 2)
    with pytest.raises(ValueError):
        imagpart_bound(1, 0.1, 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, (1 << 12) - 1), st.floats(0, 0.1), st.integers(1, 3))
def test_imagpart_property(t, th, terms):
    assert imagpart_bound_check(t, th, terms)


def test_rows_and_csv():
    rows = charfn_rows(0b10101, [0.5, 0.1])
    assert rows[0].bound == 7 / 8 and rows[0].passed
    table = list(csv.reader(io.StringIO(charfn_csv(rows))))
    assert table[0] == ["t", "theta", "re", "im", "bound", "pass"]
    assert float(table[1][1]) == 0.5 and table[1][5] == "1"
