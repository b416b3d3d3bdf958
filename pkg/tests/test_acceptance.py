"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion K: PASS|FAIL ...`` line, and the lines
are repeated in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from chiralring.anyon import (
    THETA_EQ_BRACKETS,
    AnyonParams,
    doublon_dynamics,
    doublon_step_time,
    find_theta_eq,
    perturbation_validation,
)
from chiralring.disorder import DisorderConfig, disorder_sweep
from chiralring.dynamics import average_fidelity, step_fidelities
from chiralring.floquet import (
    DriveParams,
    circulation_order,
    compare_driven_vs_effective,
    effective_couplings,
    effective_hamiltonian,
    solve_matching,
)
from chiralring.ring import (
    RingSpec,
    bond_phase,
    build_ideal,
    equidistance_report,
    loop_flux,
    perturb_spectrum,
    reverse,
)
from chiralring.spectral import hermitian_eig

from conftest import ACCEPTANCE_LINES


def report(criterion, ok, detail):
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def test_criterion_01_perfect_circulation():
    start = time.perf_counter()
    worst = 0.0
    for N in (3, 4, 5, 10):
        spec = RingSpec(N, 1.0)
        h = build_ideal(N)
        worst = max(worst, np.max(np.abs(step_fidelities(h, spec.step_time) - 1.0)))
        worst = max(worst, abs(average_fidelity(h, spec) - 1.0))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-9 and elapsed < 1.0
    assert report(1, ok, f"max |F - 1| = {worst:.2e}, {elapsed:.3f} s")


def test_criterion_02_equidistant_spectrum():
    start = time.perf_counter()
    worst_dev = worst_gap = 0.0
    for N in range(2, 17):
        spacings, dev = equidistance_report(hermitian_eig(build_ideal(N).matrix))
        worst_dev = max(worst_dev, dev)
        worst_gap = max(worst_gap, np.max(np.abs(spacings - 2 * math.sin(math.pi / N))))
    elapsed = time.perf_counter() - start
    ok = worst_dev < 1e-10 and worst_gap < 1e-10 and elapsed < 1.0
    assert report(2, ok, f"spacing deviation {worst_dev:.2e}, |spacing - b| {worst_gap:.2e}, {elapsed:.3f} s")


def test_criterion_03_coupling_table():
    h4, h5 = build_ideal(4), build_ideal(5)
    errs = [
        abs(h4.matrix[1, 0]) / abs(h4.matrix[2, 0]) - math.sqrt(2),
        bond_phase(h4, 1, 0) - math.pi / 4,
        bond_phase(h4, 2, 0),
        abs(h5.matrix[1, 0]) / abs(h5.matrix[2, 0]) - (1 + math.sqrt(5)) / 2,
        bond_phase(h5, 1, 0) - 3 * math.pi / 10,
        bond_phase(h5, 2, 0) - math.pi / 10,
    ]
    for N in range(3, 11):
        h = build_ideal(N)
        for a in range(N):
            for b in range(a + 1, N):
                for c in range(b + 1, N):
                    flux = loop_flux(h, (a, b, c))
                    errs.append(abs(flux) - math.pi / 2)
    worst = max(abs(e) for e in errs)
    assert report(3, worst < 1e-12, f"max deviation {worst:.2e} over {len(errs)} checks")


def test_criterion_04_reversal():
    worst_fid = worst_spec = 0.0
    for N in (3, 4, 5, 10):
        spec = RingSpec(N)
        h = build_ideal(N)
        r = reverse(h)
        worst_fid = max(worst_fid, np.max(np.abs(step_fidelities(r, spec.step_time, direction=-1) - 1)))
        e_h = hermitian_eig(h.matrix).eigenvalues
        e_r = hermitian_eig(r.matrix).eigenvalues
        worst_spec = max(worst_spec, np.max(np.abs(e_h - e_r)))
    ok = worst_fid < 1e-9 and worst_spec < 1e-10
    assert report(4, ok, f"reverse step fidelity error {worst_fid:.2e}, spectrum difference {worst_spec:.2e}")


def _disorder_checks(seed):
    cfg = DisorderConfig(realizations=300, seed=seed)
    onsite = {N: disorder_sweep(RingSpec(N), [0.5], "onsite", cfg).mean[0] for N in (3, 5, 10)}
    hop3 = disorder_sweep(RingSpec(3), [0.1, 0.3], "hopping", cfg).mean
    hop10 = disorder_sweep(RingSpec(10), [0.3], "hopping", cfg).mean[0]
    return {
        "a": onsite[3] > 0.95,
        "b": hop3[0] > 0.9,
        "c": onsite[5] >= onsite[3] - 0.02 and onsite[10] >= onsite[5] - 0.02,
        "d": hop10 < hop3[1],
    }


@pytest.mark.slow
def test_criterion_05_disorder_robustness():
    start = time.perf_counter()
    seeds = range(20)
    passes = {k: 0 for k in "abcd"}
    for seed in seeds:
        for k, ok in _disorder_checks(seed).items():
            passes[k] += ok
    elapsed = time.perf_counter() - start
    rates = {k: v / len(seeds) for k, v in passes.items()}
    ok = all(r >= 0.95 for r in rates.values()) and elapsed < 120
    detail = ", ".join(f"({k}) {100 * r:.0f}%" for k, r in rates.items())
    assert report(5, ok, f"seed pass rates {detail}, {elapsed:.1f} s")


def test_criterion_06_floquet_matching():
    start = time.perf_counter()
    x = solve_matching(40.0, math.pi / 3)
    p = DriveParams.from_ratios(40.0, x, math.pi / 3)
    ec = effective_couplings(p)
    residual = abs(abs(ec.Jeff) - abs(ec.Jtilde))
    revolution = 3 * ec.step_time
    cmp = compare_driven_vs_effective(p, revolution, steps_per_period=256)
    flipped = DriveParams.from_ratios(40.0, x, -math.pi / 3)
    cmp_rev = compare_driven_vs_effective(flipped, 1.5 * ec.step_time, steps_per_period=256)
    elapsed = time.perf_counter() - start
    checks = {
        "root": abs(x - 2.37) <= 0.05,
        "residual": residual < 1e-12,
        "deviation": cmp.max_deviation < 0.05,
        "reversal": circulation_order(cmp_rev.exact) == [2, 1],
        "runtime": elapsed < 30,
    }
    failed = [k for k, v in checks.items() if not v]
    detail = (
        f"A/omega = {x:.5f}, residual {residual:.1e}, max deviation over 3T = {cmp.max_deviation:.4f}, "
        f"reversed order {[s + 1 for s in circulation_order(cmp_rev.exact)]}, {elapsed:.1f} s"
    )
    if failed:
        detail += f"; failing: {', '.join(failed)}"
    assert report(6, not failed, detail)


def test_criterion_07_effective_spectrum():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        J = rng.uniform(0.2, 2.0)
        omega = rng.uniform(10.0, 120.0) * J
        p = DriveParams(J=J, A=rng.uniform(0.0, 5.0) * omega, omega=omega, phi=rng.uniform(-math.pi, math.pi))
        ec = effective_couplings(p)
        r = math.sqrt(2 * ec.Jeff**2 + abs(ec.Jtilde) ** 2)
        e = np.linalg.eigvalsh(effective_hamiltonian(ec))
        worst = max(worst, np.max(np.abs(e - [-r, 0.0, r])))
    assert report(7, worst < 1e-10, f"max eigenvalue error {worst:.2e} over 50 drives")


def _doublon_peaks(theta):
    p = AnyonParams(1.0, 30.0, theta)
    period = doublon_step_time(p)
    traj = doublon_dynamics(p, 2.0 * period, 4001)
    window = traj.times <= 1.5 * period
    n2, n3 = traj.records[:, 1], traj.records[:, 2]
    i2, i3 = np.argmax(np.where(window, n2, -1)), np.argmax(np.where(window, n3, -1))
    return traj.times[i2], n2[i2], traj.times[i3], n3[i3], period


def test_criterion_08_doublon_dynamics():
    start = time.perf_counter()
    t2, peak2, t3, peak3, period = _doublon_peaks(math.pi / 6)
    rt2, rpeak2, rt3, rpeak3, _ = _doublon_peaks(-math.pi / 6)
    elapsed = time.perf_counter() - start
    ok = (
        peak2 >= 1.9
        and t2 < t3
        and abs(t2 - period) <= 0.1 * period
        and rpeak3 >= 1.9
        and rt3 < rt2
        and elapsed < 1.0
    )
    detail = (
        f"theta=pi/6: <n2> peak {peak2:.4f} at t={t2:.2f} (expected {period:.2f}), <n3> peak at t={t3:.2f}; "
        f"theta=-pi/6: <n3> peak {rpeak3:.4f} at t={rt3:.2f} before <n2> at t={rt2:.2f}; {elapsed:.2f} s"
    )
    assert report(8, ok, detail)


def test_criterion_09_theta_eq_convergence():
    asymptotes = (math.pi / 6, math.pi / 2, 5 * math.pi / 6)
    offsets = {}
    flux_err = 0.0
    for u, tol in ((1000.0, 1e-3), (30.0, 0.05)):
        for k, (bracket, target) in enumerate(zip(THETA_EQ_BRACKETS, asymptotes)):
            th = find_theta_eq(1.0, u, bracket)
            offsets[(u, k + 1)] = (th - target, tol)
            flux = (-3 * th) % (2 * math.pi)
            flux_err = max(flux_err, min(abs(flux - math.pi / 2), abs(flux - 3 * math.pi / 2)))
    bad = [f"U/J={u:g} branch {k}: {off:+.2e} (tol {tol:g})" for (u, k), (off, tol) in offsets.items()
           if abs(off) > tol]
    ok = not bad and flux_err < 1e-9
    detail = f"max |(-3 theta) mod 2pi - {{pi/2, 3pi/2}}| = {flux_err:.2e}"
    if bad:
        detail += "; outside tolerance: " + "; ".join(bad)
    assert report(9, ok, detail)


def test_criterion_10_perturbation_scaling():
    ratios = []
    for theta in (math.pi / 6, 0.0, math.pi / 2):
        errs = [perturbation_validation(1.0, u, theta) for u in (25.0, 50.0, 100.0, 200.0)]
        ratios += [errs[i] / errs[i + 1] for i in range(3)]
    worst = min(ratios)
    assert report(10, worst >= 3.0, f"smallest mismatch ratio per doubling of U: {worst:.3f}")


def test_criterion_11_necessity():
    spec = RingSpec(5)
    h = build_ideal(5)
    ok = True
    summary = []
    for level in range(5):
        fids = [average_fidelity(perturb_spectrum(h, level, d * spec.b), spec) for d in (1e-2, 3e-2, 1e-1)]
        ok &= fids[0] > fids[1] > fids[2] and fids[0] < 1.0
        if level == 0:
            summary = fids
    assert report(11, ok, "F for delta/b = 1e-2, 3e-2, 1e-1: " + ", ".join(f"{f:.6f}" for f in summary))
