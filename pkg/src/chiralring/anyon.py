"""Two anyons on a three-site ring and their bound-pair (doublon) limit.

The bosonic form of the model is

    H = -J sum_j ( exp(-i theta n_j) b_{j+1}^dag b_j + h.c. ) + U/2 sum_j n_j (n_j - 1)

on a periodic ring. The density phase acts after the hop, i.e. it sees the
occupation of site j once the particle has left.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.optimize import bisect

from .dynamics import Trajectory, format_float
from .ring import loop_flux
from .spectral import hermitian_eig

N_SITES = 3
FOCK_BASIS: Tuple[Tuple[int, int, int], ...] = (
    (2, 0, 0),
    (0, 2, 0),
    (0, 0, 2),
    (1, 1, 0),
    (1, 0, 1),
    (0, 1, 1),
)
_INDEX = {s: i for i, s in enumerate(FOCK_BASIS)}
DOUBLON_STATES = (0, 1, 2)
THETA_EQ_BRACKETS = ((0.1, 0.9), (1.2, 1.9), (2.2, 2.9))
STRONG_COUPLING = 20.0


@dataclass(frozen=True)
class AnyonParams:
    J: float
    U: float
    theta: float

    def __post_init__(self):
        if not self.J >= 0:
            raise ValueError(f"J must be non-negative, got {self.J}")
        if not self.U > 0:
            raise ValueError(f"U must be positive, got {self.U}")

    @property
    def strong_coupling(self) -> bool:
        return self.J == 0 or self.U / self.J >= STRONG_COUPLING


def build_two_particle_hamiltonian(p: AnyonParams) -> np.ndarray:
    """6x6 matrix of the two-particle problem in :data:`FOCK_BASIS` order."""
    h = np.zeros((6, 6), dtype=complex)
    for i, occ in enumerate(FOCK_BASIS):
        h[i, i] = 0.5 * p.U * sum(n * (n - 1) for n in occ)
        for j in range(N_SITES):
            k = (j + 1) % N_SITES
            if occ[j] == 0:
                continue
            new = list(occ)
            amp = math.sqrt(new[j])
            new[j] -= 1
            amp *= math.sqrt(new[k] + 1)
            new[k] += 1
            elem = -p.J * amp * np.exp(-1j * p.theta * new[j])
            f = _INDEX[tuple(new)]
            h[f, i] += elem
            h[i, f] += np.conj(elem)
    return h


@dataclass(frozen=True)
class DoublonModel:
    """Second-order doublon Hamiltonian with the uniform shift kept separately."""

    hop_amplitude: float
    per_bond_phase: float
    onsite_shift: float
    matrix: np.ndarray

    @property
    def flux(self) -> float:
        """Argument of the hopping product around 1 -> 2 -> 3 -> 1, in (-pi, pi]."""
        if self.hop_amplitude == 0:
            return 0.0
        return loop_flux(self.matrix, (0, 1, 2), sign=+1)

    @property
    def step_time(self) -> float:
        """Doublon circulation step ``2 pi / (3 b)`` with ``b = 2 J_d sin(pi/3)``."""
        return 2.0 * math.pi / (3.0 * 2.0 * self.hop_amplitude * math.sin(math.pi / 3))


def doublon_effective(p: AnyonParams) -> DoublonModel:
    jd = 2.0 * p.J**2 / p.U
    h = np.zeros((3, 3), dtype=complex)
    for j in range(N_SITES):
        h[(j + 1) % N_SITES, j] = jd * np.exp(-1j * p.theta)
    h = h + h.conj().T
    return DoublonModel(jd, -p.theta, p.U + 4.0 * p.J**2 / p.U, h)


def doublon_step_time(p: AnyonParams) -> float:
    """``pi U / (3 sqrt(3) J^2)``."""
    return doublon_effective(p).step_time


def doublon_dynamics(p: AnyonParams, t_end: float, samples: int) -> Trajectory:
    """Site occupations ``<n_i>(t)`` starting from both particles on site 1."""
    if samples < 2:
        raise ValueError("need at least two samples")
    eig = hermitian_eig(build_two_particle_hamiltonian(p))
    occ = np.array(FOCK_BASIS, dtype=float)
    times = np.linspace(0.0, t_end, samples)
    v = eig.eigenvectors
    coeff = v.conj()[0]
    amps = (np.exp(-1j * np.outer(times, eig.eigenvalues)) * coeff) @ v.T
    return Trajectory(times, (np.abs(amps) ** 2) @ occ, column_prefix="n")


def spectrum_vs_theta(J: float, U: float, thetas: Sequence[float]) -> np.ndarray:
    """Sorted two-particle spectra, one row of six levels per angle."""
    thetas = list(thetas)
    if not thetas:
        raise ValueError("theta grid is empty")
    return np.array(
        [hermitian_eig(build_two_particle_hamiltonian(AnyonParams(J, U, th))).eigenvalues for th in thetas]
    )


def spectrum_csv(thetas: Sequence[float], spectra: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta"] + [f"E{i + 1}" for i in range(spectra.shape[1])])
    for th, row in zip(thetas, spectra):
        w.writerow([format_float(th)] + [format_float(e) for e in row])
    return buf.getvalue()


def doublon_band_asymmetry(theta: float, J: float, U: float) -> float:
    """``(E6 - E5) - (E5 - E4)`` for the three highest levels."""
    e = np.linalg.eigvalsh(build_two_particle_hamiltonian(AnyonParams(J, U, theta)))
    return (e[5] - e[4]) - (e[4] - e[3])


def find_theta_eq(J: float, U: float, bracket: Tuple[float, float]) -> float:
    """Statistical angle inside ``bracket`` that makes the doublon band equidistant."""
    a, b = bracket
    ga, gb = doublon_band_asymmetry(a, J, U), doublon_band_asymmetry(b, J, U)
    if ga == 0.0:
        return a
    if gb == 0.0:
        return b
    if np.sign(ga) == np.sign(gb):
        raise ValueError(
            f"doublon-band asymmetry does not change sign on [{a}, {b}] at U/J = {U / J:g}"
        )
    return bisect(
        doublon_band_asymmetry, a, b, args=(J, U), xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200
    )


def theta_eq_sweep(J: float, u_values: Sequence[float], brackets=THETA_EQ_BRACKETS) -> np.ndarray:
    """Rows of ``theta_eq`` per branch; NaN where a bracket holds no root."""
    out = np.full((len(u_values), len(brackets)), np.nan)
    for i, u in enumerate(u_values):
        for k, br in enumerate(brackets):
            try:
                out[i, k] = find_theta_eq(J, u, br)
            except ValueError:
                pass
    return out


def perturbation_validation(J: float, U: float, theta: float) -> float:
    """Largest gap between the exact doublon band and the shifted second-order model."""
    if J > 0 and U / J < STRONG_COUPLING:
        raise ValueError(f"U/J = {U / J:g} below the strong-coupling regime (>= {STRONG_COUPLING:g})")
    p = AnyonParams(J, U, theta)
    exact = np.linalg.eigvalsh(build_two_particle_hamiltonian(p))[3:]
    model = doublon_effective(p)
    approx = np.linalg.eigvalsh(model.matrix) + model.onsite_shift
    return float(np.max(np.abs(exact - approx)))
