"""Closed-form chiral-circulation ring Hamiltonian and its gauge toolkit.

Sites are 0-based in the Python API. Hoppings follow the convention

    H = -sum_{m>n} |J_mn| exp(i Phi_mn) a_m^dag a_n + h.c.

so the Peierls phase of a bond is ``arg(-H[m, n])`` and loop fluxes are the
argument of the product of ``-H[next, cur]`` around a directed cycle.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .spectral import EigenSystem, check_hermitian, hermitian_eig


class Convention(str, enum.Enum):
    AS_DERIVED = "as-derived"
    UNIFORM_HALF_PI = "uniform-half-pi"


@dataclass(frozen=True)
class RingSpec:
    """Ring size and nearest-neighbour amplitude, with derived spacing and step time."""

    N: int
    J: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"ring size N must be an integer >= 2, got {self.N}")
        if not (self.J > 0 and math.isfinite(self.J)):
            raise ValueError(f"hopping J must be positive and finite, got {self.J}")

    @property
    def b(self) -> float:
        """Level spacing ``2 J sin(pi/N)``."""
        return 2.0 * self.J * math.sin(math.pi / self.N)

    @property
    def step_time(self) -> float:
        """Time for one site of circulation, ``2 pi / (N b)``."""
        return 2.0 * math.pi / (self.N * self.b)

    @property
    def period(self) -> float:
        return self.N * self.step_time


@dataclass(frozen=True)
class ChiralRingHamiltonian:
    spec: RingSpec
    matrix: np.ndarray
    convention: Convention = Convention.AS_DERIVED

    @property
    def N(self) -> int:
        return self.spec.N

    def with_matrix(self, matrix: np.ndarray) -> "ChiralRingHamiltonian":
        return ChiralRingHamiltonian(self.spec, _frozen(matrix), self.convention)


def _frozen(matrix) -> np.ndarray:
    m = np.array(matrix, dtype=complex)
    m.setflags(write=False)
    return m


def _as_matrix(h) -> np.ndarray:
    return h.matrix if isinstance(h, ChiralRingHamiltonian) else np.asarray(h, dtype=complex)


def hopping_amplitude(N: int, J: float, distance: int) -> float:
    """``|J_mn|`` for two sites ``distance`` apart on an N-site ring."""
    return J * abs(math.sin(math.pi / N)) / abs(math.sin(math.pi * distance / N))


def peierls_phase(N: int, distance: int) -> float:
    """As-derived bond phase for ``m - n = distance > 0``."""
    return -math.pi * distance / N + math.pi / 2


def site_gauge(N: int) -> np.ndarray:
    """Per-site phases ``alpha_n = pi n / N`` (1-based n) that flatten every bond phase to pi/2."""
    return math.pi * np.arange(1, N + 1) / N


def build_ideal(N: int, J: float = 1.0, convention=Convention.AS_DERIVED) -> ChiralRingHamiltonian:
    """Build the perfect-circulation Hamiltonian for an N-site ring.

    Diagonal entries are zero; the uniform on-site energy ``b (N-1)/2`` of
    the underlying equidistant spectrum is dropped, which only changes the
    global phase acquired per step.
    """
    spec = RingSpec(N, J)
    convention = Convention(convention)
    h = np.zeros((N, N), dtype=complex)
    for m in range(N):
        for n in range(m):
            d = m - n
            h[m, n] = -hopping_amplitude(N, J, d) * np.exp(1j * peierls_phase(N, d))
            h[n, m] = np.conj(h[m, n])
    ham = ChiralRingHamiltonian(spec, _frozen(h), Convention.AS_DERIVED)
    if convention is Convention.UNIFORM_HALF_PI:
        ham = apply_gauge(ham, site_gauge(N))
        ham = ChiralRingHamiltonian(spec, ham.matrix, Convention.UNIFORM_HALF_PI)
    return ham


def apply_gauge(h, alphas: Sequence[float]):
    """Return ``D H D^dagger`` with ``D = diag(exp(i alpha))``."""
    m = _as_matrix(h)
    alphas = np.asarray(alphas, dtype=float)
    if alphas.shape != (m.shape[0],):
        raise ValueError(f"need {m.shape[0]} gauge phases, got {alphas.shape}")
    d = np.exp(1j * alphas)
    out = d[:, None] * m * d.conj()[None, :]
    if isinstance(h, ChiralRingHamiltonian):
        return h.with_matrix(out)
    return out


def reverse(h):
    """Complex-conjugate Hamiltonian, which circulates the other way round."""
    if isinstance(h, ChiralRingHamiltonian):
        return h.with_matrix(h.matrix.conj())
    return np.asarray(h, dtype=complex).conj()


def bond_phase(h, m: int, n: int) -> float:
    """Peierls phase ``arg(-H[m, n])`` of the bond n -> m."""
    return float(np.angle(-_as_matrix(h)[m, n]))


def bloch_mode(N: int, k: int) -> np.ndarray:
    """Discrete Fourier mode with amplitude ``exp(2 pi i k n / N) / sqrt(N)`` on site n (1-based)."""
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    if not 0 <= k < N:
        raise ValueError(f"quasi-momentum index k={k} outside [0, {N - 1}]")
    n = np.arange(1, N + 1)
    return np.exp(2j * np.pi * k * n / N) / math.sqrt(N)


def principal_angle(phi: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    r = math.remainder(phi, 2 * math.pi)
    if r <= -math.pi:
        r += 2 * math.pi
    return r


def loop_flux(h, cycle: Sequence[int], sign: int = -1, coupling_tol: float = 1e-14) -> float:
    """Gauge-invariant flux through a directed cycle of sites.

    ``sign=-1`` uses the ``-|J| e^{i Phi}`` bookkeeping of the ring model;
    ``sign=+1`` takes the bare argument of the hopping matrix elements.
    The result is reduced to (-pi, pi].
    """
    m = _as_matrix(h)
    cycle = list(cycle)
    if len(set(cycle)) < 3 or len(set(cycle)) != len(cycle):
        raise ValueError(f"cycle must visit at least 3 distinct sites once each, got {cycle}")
    prod = 1.0 + 0j
    for cur, nxt in zip(cycle, cycle[1:] + cycle[:1]):
        elem = sign * m[nxt, cur]
        if abs(elem) <= coupling_tol:
            raise ValueError(f"sites {cur} and {nxt} are not coupled")
        prod *= elem / abs(elem)
    return principal_angle(float(np.angle(prod)))


def equidistance_report(eig) -> tuple[np.ndarray, float]:
    """Consecutive level spacings and their maximum deviation from the mean spacing."""
    vals = eig.eigenvalues if isinstance(eig, EigenSystem) else np.asarray(eig, dtype=float)
    if len(vals) < 2:
        raise ValueError("need at least two levels to talk about spacings")
    spacings = np.diff(np.sort(vals))
    return spacings, float(np.max(np.abs(spacings - spacings.mean())))


def flux_ring_hamiltonian(N: int, J: float, flux: float) -> np.ndarray:
    """Uniform nearest-neighbour ring threaded by ``flux``, split evenly over the N bonds."""
    if N < 3:
        raise ValueError("a flux-threaded ring needs N >= 3")
    h = np.zeros((N, N), dtype=complex)
    for j in range(N):
        h[(j + 1) % N, j] += -J * np.exp(1j * flux / N)
    return h + h.conj().T


def perturb_spectrum(h, level: int, delta: float) -> np.ndarray:
    """Shift one eigenvalue by ``delta`` and rebuild ``V diag(E') V^dagger``.

    Used to show that breaking equidistance destroys perfect circulation.
    """
    eig = hermitian_eig(_as_matrix(h))
    vals = np.array(eig.eigenvalues)
    vals[level] += delta
    v = eig.eigenvectors
    return (v * vals) @ v.conj().T


def to_json_dict(h: ChiralRingHamiltonian) -> dict:
    m = h.matrix
    return {
        "N": h.N,
        "J": h.spec.J,
        "convention": h.convention.value,
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def from_json_dict(doc: dict) -> ChiralRingHamiltonian:
    for key in ("N", "J", "convention", "entries"):
        if key not in doc:
            raise ValueError(f"Hamiltonian document missing key {key!r}")
    spec = RingSpec(int(doc["N"]), float(doc["J"]))
    entries = np.array(
        [[complex(re, im) for re, im in row] for row in doc["entries"]], dtype=complex
    )
    if entries.shape != (spec.N, spec.N):
        raise ValueError(f"entries have shape {entries.shape}, expected {(spec.N, spec.N)}")
    check_hermitian(entries)
    return ChiralRingHamiltonian(spec, _frozen(entries), Convention(doc["convention"]))


def dumps(h: ChiralRingHamiltonian) -> str:
    return json.dumps(to_json_dict(h), indent=1)


def loads(text: str) -> ChiralRingHamiltonian:
    return from_json_dict(json.loads(text))
