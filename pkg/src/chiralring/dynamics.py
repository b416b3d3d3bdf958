"""Time evolution and transfer-fidelity metrics."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .ring import ChiralRingHamiltonian, RingSpec
from .spectral import EigenSystem, check_hermitian, hermitian_eig, propagator

NORM_TOL = 1e-12
DRIFT_LIMIT = 1e-6


class IntegratorError(RuntimeError):
    def __init__(self, drift: float):
        self.drift = drift
        super().__init__(f"norm drift {drift:.3e} exceeds {DRIFT_LIMIT:.0e}")


def format_float(x: float) -> str:
    """Shortest round-trip representation of a double."""
    return repr(float(x))


@dataclass(frozen=True)
class Trajectory:
    """Per-site values sampled on a time grid.

    ``records[i, n]`` is either a population ``|<n|psi(t_i)>|^2`` or, for
    many-body states, an occupation expectation ``<n_i>``.
    """

    times: np.ndarray
    records: np.ndarray
    column_prefix: str = "p"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.times) != len(self.records):
            raise ValueError("times and records differ in length")
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    @property
    def n_sites(self) -> int:
        return self.records.shape[1]

    def header(self) -> list[str]:
        return ["t"] + [f"{self.column_prefix}{i + 1}" for i in range(self.n_sites)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        for t, row in zip(self.times, self.records):
            w.writerow([format_float(t)] + [format_float(v) for v in row])
        return buf.getvalue()

    def first_peak_time(self, site: int, threshold: float) -> Optional[float]:
        """Earliest sample time at which ``site`` reaches ``threshold``, or None."""
        hits = np.nonzero(self.records[:, site] >= threshold)[0]
        return float(self.times[hits[0]]) if len(hits) else None


def _as_operator(h) -> np.ndarray:
    if isinstance(h, ChiralRingHamiltonian):
        return h.matrix
    return np.asarray(h, dtype=complex)


def _check_state(psi0, dim: int) -> np.ndarray:
    psi = np.asarray(psi0, dtype=complex)
    if psi.shape != (dim,):
        raise ValueError(f"initial state has shape {psi.shape}, operator dimension is {dim}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"initial state is not normalized (norm = {norm!r})")
    return psi


def evolve_static(h, psi0, times: Sequence[float]) -> Trajectory:
    """Exact spectral evolution of ``psi0`` under a time-independent Hamiltonian."""
    eig = h if isinstance(h, EigenSystem) else hermitian_eig(_as_operator(h))
    psi = _check_state(psi0, eig.dim)
    times = np.asarray(times, dtype=float)
    v = eig.eigenvectors
    coeff = v.conj().T @ psi
    phases = np.exp(-1j * np.outer(times, eig.eigenvalues))
    amps = (phases * coeff) @ v.T
    return Trajectory(times, np.abs(amps) ** 2)


@dataclass(frozen=True)
class DrivenHamiltonian:
    """A time-dependent Hamiltonian ``t -> H(t)`` that repeats with ``period``."""

    dim: int
    evaluator: Callable[[float], np.ndarray]
    period: Optional[float] = None

    def __call__(self, t: float) -> np.ndarray:
        return check_hermitian(self.evaluator(t))


# Gauss-Legendre nodes and weights of the fourth-order commutator-free
# exponential integrator with two exponentials per step.
_CF4_NODES = (0.5 - math.sqrt(3) / 6, 0.5 + math.sqrt(3) / 6)
_CF4_A1 = (3 - 2 * math.sqrt(3)) / 12
_CF4_A2 = (3 + 2 * math.sqrt(3)) / 12


def _substep(h: DrivenHamiltonian, t: float, dt: float, method: str) -> np.ndarray:
    if method == "midpoint":
        return propagator(hermitian_eig(h(t + 0.5 * dt)), dt)
    if method == "cf4":
        h1 = h(t + _CF4_NODES[0] * dt)
        h2 = h(t + _CF4_NODES[1] * dt)
        first = propagator(hermitian_eig(_CF4_A2 * h1 + _CF4_A1 * h2), dt)
        second = propagator(hermitian_eig(_CF4_A1 * h1 + _CF4_A2 * h2), dt)
        return second @ first
    raise ValueError(f"unknown integrator {method!r}; use 'cf4' or 'midpoint'")


def evolve_driven(
    h: DrivenHamiltonian,
    psi0,
    t_end: float,
    steps_per_period: int = 256,
    period: Optional[float] = None,
    method: str = "cf4",
    record: str = "period",
) -> Trajectory:
    """Propagate under a periodic drive with piecewise-exponential substeps.

    Every substep is an exact exponential of a Hermitian matrix, so the
    evolution stays unitary. Because the drive is periodic, the substep
    propagators of one period are built once and reused for all periods.

    Parameters
    ----------
    h : DrivenHamiltonian
        Drive; must satisfy ``H(t + period) = H(t)``.
    psi0 : array_like
        Normalized initial state.
    t_end : float
        Final time (> 0).
    steps_per_period : int
        Substeps per drive period, at least 64.
    period : float, optional
        Drive period; defaults to ``h.period``.
    method : {"cf4", "midpoint"}
        Fourth-order commutator-free scheme (default) or the second-order
        exponential midpoint rule.
    record : {"period", "substep"}
        Sample at every period boundary (stroboscopic) or at every substep.
        ``t_end`` is always included.
    """
    period = h.period if period is None else period
    if period is None or not period > 0:
        raise ValueError("a positive drive period is required")
    if steps_per_period < 64:
        raise ValueError(f"steps_per_period must be >= 64, got {steps_per_period}")
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if record not in ("period", "substep"):
        raise ValueError(f"record must be 'period' or 'substep', got {record!r}")
    psi = _check_state(psi0, h.dim)

    dt = period / steps_per_period
    steps = [_substep(h, s * dt, dt, method) for s in range(steps_per_period)]
    n_periods = int(math.floor(t_end / period + 1e-12))
    remainder = t_end - n_periods * period

    if record == "substep":
        cumulative = [np.eye(h.dim, dtype=complex)]
        for u in steps[:-1]:
            cumulative.append(u @ cumulative[-1])
    floquet = np.eye(h.dim, dtype=complex)
    for u in steps:
        floquet = u @ floquet

    times, states = [0.0], [psi]
    for k in range(n_periods):
        start = states[-1]
        if record == "substep":
            for s in range(1, steps_per_period):
                times.append(k * period + s * dt)
                states.append(cumulative[s] @ start)
        times.append((k + 1) * period)
        states.append(floquet @ start)
    if remainder > 1e-12 * period:
        n_rem = max(1, int(math.ceil(remainder / dt - 1e-9)))
        sub = remainder / n_rem
        cur = states[-1]
        t0 = n_periods * period
        for s in range(n_rem):
            cur = _substep(h, t0 + s * sub, sub, method) @ cur
            if record == "substep" or s == n_rem - 1:
                times.append(t0 + (s + 1) * sub)
                states.append(cur)

    states = np.array(states)
    drift = abs(float(np.linalg.norm(states[-1])) - 1.0)
    if drift > DRIFT_LIMIT:
        raise IntegratorError(drift)
    return Trajectory(
        np.array(times),
        np.abs(states) ** 2,
        meta={"method": method, "steps_per_period": steps_per_period, "norm_drift": drift},
    )


def step_fidelities(h, step_time: float, source: int = 0, direction: int = 1) -> np.ndarray:
    """``|<source + direction*n|U(n T)|source>|^2`` for n = 1..N, indices taken mod N.

    ``direction=-1`` scores counterclockwise transfer.
    """
    if direction not in (1, -1):
        raise ValueError(f"direction must be +1 or -1, got {direction}")
    m = _as_operator(h)
    eig = hermitian_eig(m)
    N = eig.dim
    coeff = eig.eigenvectors.conj()[source]
    out = np.empty(N)
    for n in range(1, N + 1):
        row = eig.eigenvectors[(source + direction * n) % N]
        amp = np.sum(row * np.exp(-1j * eig.eigenvalues * n * step_time) * coeff)
        out[n - 1] = abs(amp) ** 2
    return out


def step_fidelity(h, step_time: float, n: int, source: int = 0) -> float:
    """Probability of finding the excitation on ``source + n`` after ``n`` steps."""
    m = _as_operator(h)
    N = m.shape[0]
    if not 1 <= n <= N:
        raise ValueError(f"step count n={n} outside [1, {N}]")
    u = propagator(hermitian_eig(m), n * step_time)
    return float(abs(u[(source + n) % N, source]) ** 2)


def average_fidelity(h, ring_spec) -> float:
    """Mean of the N step fidelities from site 0 at the clean step time of ``ring_spec``.

    ``ring_spec`` may be a :class:`RingSpec` or a bare step time.
    """
    m = _as_operator(h)
    if isinstance(ring_spec, RingSpec):
        if ring_spec.N != m.shape[0]:
            raise ValueError(f"Hamiltonian has dimension {m.shape[0]}, ring has N={ring_spec.N}")
        step_time = ring_spec.step_time
    else:
        step_time = float(ring_spec)
    return float(np.mean(step_fidelities(m, step_time)))
