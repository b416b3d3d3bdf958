import json
import math
import subprocess
import sys

import numpy as np
import pytest

from chiralring.disorder import (
    DisorderConfig,
    Mode,
    disorder_sweep,
    mean_hopping,
    realization_rng,
    sample_disordered,
)
from chiralring.ring import RingSpec, build_ideal


def test_mean_hopping_n4():
    # four nearest-neighbour bonds of 1 and two diagonals of 1/sqrt(2)
    assert mean_hopping(build_ideal(4)) == pytest.approx((4 + math.sqrt(2)) / 6, abs=1e-15)


def test_mean_hopping_n10_by_direct_summation():
    N = 10
    total, count = 0.0, 0
    for m in range(N):
        for n in range(m):
            total += math.sin(math.pi / N) / abs(math.sin(math.pi * (m - n) / N))
            count += 1
    assert mean_hopping(build_ideal(N)) == pytest.approx(total / count, abs=1e-14)


def test_mean_hopping_n3_is_j():
    assert mean_hopping(build_ideal(3, 2.5)) == pytest.approx(2.5, abs=1e-15)


def test_clean_config_reproduces_ideal():
    h = build_ideal(5)
    m, clamped = sample_disordered(h, DisorderConfig(), 0)
    assert np.allclose(m, h.matrix, atol=1e-15) and clamped == 0


def test_samples_are_hermitian_and_within_bounds():
    h = build_ideal(5)
    jbar = mean_hopping(h)
    cfg = DisorderConfig(W=0.4, dJ=0.2, seed=3)
    for r in range(20):
        m, _ = sample_disordered(h, cfg, r)
        assert np.allclose(m, m.conj().T)
        assert np.all(np.abs(np.diag(m).real) <= 0.4 * jbar)
        rows, cols = np.tril_indices(5, -1)
        shift = np.abs(m[rows, cols]) - np.abs(h.matrix[rows, cols])
        assert np.all(np.abs(shift) <= 0.2 * jbar + 1e-15)
        # Peierls phases untouched
        assert np.allclose(np.angle(m[rows, cols]), np.angle(h.matrix[rows, cols]))


def test_stream_layout_does_not_depend_on_strengths():
    h = build_ideal(4)
    a, _ = sample_disordered(h, DisorderConfig(W=1.0, dJ=0.0, seed=9), 5)
    b, _ = sample_disordered(h, DisorderConfig(W=1.0, dJ=0.3, seed=9), 5)
    assert np.array_equal(np.diag(a), np.diag(b))


def test_large_hopping_noise_is_clamped_and_counted():
    h = build_ideal(6)
    cfg = DisorderConfig(dJ=5.0, seed=1)
    total = 0
    for r in range(10):
        m, c = sample_disordered(h, cfg, r)
        total += c
        assert np.count_nonzero(np.abs(m[np.tril_indices(6, -1)]) == 0) == c
    assert total > 0


def test_realization_streams_are_distinct():
    a = realization_rng(0, 0, 0).uniform(size=4)
    b = realization_rng(0, 0, 1).uniform(size=4)
    c = realization_rng(0, 1, 0).uniform(size=4)
    assert not np.allclose(a, b) and not np.allclose(a, c)
    assert np.array_equal(a, realization_rng(0, 0, 0).uniform(size=4))


def test_sweep_envelope_and_clean_point():
    res = disorder_sweep(RingSpec(3), [0.0, 0.5], Mode.ONSITE, DisorderConfig(realizations=40, seed=2))
    assert res.mean[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(res.lo <= res.mean) and np.all(res.mean <= res.hi)
    assert np.all(res.hi <= 1.0 + 1e-12) and np.all(res.lo >= 0)
    assert res.samples.shape == (2, 40)
    lines = res.to_csv().splitlines()
    assert lines[0] == "strength,mean,lo,hi,clamped_count" and len(lines) == 3
    doc = json.loads(res.to_json())
    assert doc["mode"] == "onsite" and len(doc["fidelities"][1]) == 40


def test_sweep_is_deterministic_in_process_and_across_processes():
    args = (RingSpec(4), [0.2, 0.4], Mode.HOPPING, DisorderConfig(realizations=15, seed=11))
    first = disorder_sweep(*args).to_json()
    assert disorder_sweep(*args).to_json() == first
    code = (
        "from chiralring.disorder import *; from chiralring.ring import RingSpec;"
        "print(disorder_sweep(RingSpec(4), [0.2, 0.4], Mode.HOPPING,"
        " DisorderConfig(realizations=15, seed=11)).to_json())"
    )
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert out.stdout.strip() == first


def test_config_validation():
    with pytest.raises(ValueError):
        DisorderConfig(W=-0.1)
    with pytest.raises(ValueError):
        DisorderConfig(realizations=0)
    with pytest.raises(ValueError):
        disorder_sweep(RingSpec(3), [-1.0], "onsite", DisorderConfig(realizations=1))
    with pytest.raises(ValueError):
        disorder_sweep(RingSpec(3), [0.1], "sideways", DisorderConfig(realizations=1))
