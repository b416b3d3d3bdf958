"""Floquet synthesis of the three-site chiral ring from a driven open chain.

The chain ``1 - 2 - 3`` has on-site drives ``f_1 = A cos(w t + phi)`` and
``f_3 = -A cos(w t - phi)``. To first order in ``1/w`` it behaves as a
triangle with renormalized nearest-neighbour hopping ``J_eff = J J_0(A/w)``
and an induced, purely imaginary 1-3 coupling ``Jtilde``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.optimize import bisect

from .bessel import bessel_sequence
from .dynamics import DrivenHamiltonian, Trajectory, evolve_driven, evolve_static
from .spectral import basis_state

DEFAULT_M_MAX = 40
DEFAULT_BRACKET = (2.0, 2.4048)
HIGH_FREQUENCY_RATIO = 10.0


class NoRootError(ValueError):
    pass


@dataclass(frozen=True)
class DriveParams:
    J: float
    A: float
    omega: float
    phi: float

    def __post_init__(self):
        if not self.J > 0:
            raise ValueError(f"J must be positive, got {self.J}")
        if not self.A >= 0:
            raise ValueError(f"drive amplitude must be non-negative, got {self.A}")
        if not self.omega > 0:
            raise ValueError(f"drive frequency must be positive, got {self.omega}")

    @classmethod
    def from_ratios(cls, omega_over_j: float, a_over_omega: float, phi: float, J: float = 1.0):
        omega = omega_over_j * J
        return cls(J=J, A=a_over_omega * omega, omega=omega, phi=phi)

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    @property
    def high_frequency(self) -> bool:
        return self.omega / self.J >= HIGH_FREQUENCY_RATIO


@dataclass(frozen=True)
class EffectiveCouplings:
    Jeff: float
    Jtilde: complex
    m_max: int

    @property
    def spectral_radius(self) -> float:
        """``r`` in the effective spectrum ``{-r, 0, r}``."""
        return math.sqrt(2 * self.Jeff**2 + abs(self.Jtilde) ** 2)

    @property
    def step_time(self) -> float:
        """Circulation step time of the effective triangle, ``2 pi / (3 r)``."""
        return 2.0 * math.pi / (3.0 * self.spectral_radius)


def driven_hamiltonian(p: DriveParams) -> DrivenHamiltonian:
    hop = np.zeros((3, 3), dtype=complex)
    hop[0, 1] = hop[1, 0] = hop[1, 2] = hop[2, 1] = -p.J

    def evaluator(t: float) -> np.ndarray:
        h = hop.copy()
        h[0, 0] = p.A * math.cos(p.omega * t + p.phi)
        h[2, 2] = -p.A * math.cos(p.omega * t - p.phi)
        return h

    return DrivenHamiltonian(dim=3, evaluator=evaluator, period=p.period)


def effective_couplings(p: DriveParams, m_max: int = DEFAULT_M_MAX) -> EffectiveCouplings:
    """First-order high-frequency couplings of the driven chain."""
    if m_max < 1:
        raise ValueError(f"m_max must be >= 1, got {m_max}")
    if not p.high_frequency:
        warnings.warn(
            f"omega/J = {p.omega / p.J:g} < {HIGH_FREQUENCY_RATIO:g}; the first-order "
            "effective model is not reliable here",
            RuntimeWarning,
            stacklevel=2,
        )
    x = p.A / p.omega
    js = bessel_sequence(m_max, x)
    m = np.arange(1, m_max + 1)
    # J_{-m} = (-1)^m J_m
    series = np.sum(js[1:] * ((-1.0) ** m * js[1:]) * np.sin(2 * m * p.phi) / m)
    jtilde = complex(0.0, -2.0 * p.J**2 / p.omega * series)
    return EffectiveCouplings(Jeff=p.J * float(js[0]), Jtilde=jtilde, m_max=m_max)


def effective_hamiltonian(ec: EffectiveCouplings) -> np.ndarray:
    h = np.zeros((3, 3), dtype=complex)
    h[1, 0] = h[2, 1] = -ec.Jeff
    h[2, 0] = ec.Jtilde
    return h + h.conj().T


def matching_residual(x: float, omega_over_j: float, phi: float, J: float = 1.0) -> float:
    """``|J_eff| - |Jtilde|`` at ``A/omega = x``."""
    ec = effective_couplings(DriveParams.from_ratios(omega_over_j, x, phi, J))
    return abs(ec.Jeff) - abs(ec.Jtilde)


def solve_matching(
    omega_over_j: float,
    phi: float,
    bracket: Tuple[float, float] = DEFAULT_BRACKET,
    J: float = 1.0,
) -> float:
    """Drive strength ``A/omega`` at which the three bonds have equal magnitude."""
    a, b = bracket
    fa = matching_residual(a, omega_over_j, phi, J)
    fb = matching_residual(b, omega_over_j, phi, J)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise NoRootError(
            f"|J_eff| - |Jtilde| does not change sign on [{a}, {b}] "
            f"(values {fa:.3e}, {fb:.3e})"
        )
    return bisect(
        matching_residual, a, b, args=(omega_over_j, phi, J), xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200
    )


def matching_report(omega_over_j: float, phi: float, bracket=DEFAULT_BRACKET, J: float = 1.0) -> dict:
    x = solve_matching(omega_over_j, phi, bracket, J)
    ec = effective_couplings(DriveParams.from_ratios(omega_over_j, x, phi, J))
    return {
        "omegaOverJ": omega_over_j,
        "phi": phi,
        "AoverOmega": x,
        "Jeff": ec.Jeff,
        "ImJtilde": ec.Jtilde.imag,
        "residual": abs(abs(ec.Jeff) - abs(ec.Jtilde)),
    }


@dataclass(frozen=True)
class FloquetComparison:
    max_deviation: float
    exact: Trajectory
    effective: Trajectory
    couplings: EffectiveCouplings
    sampling: str = "stroboscopic: integer multiples of the drive period 2*pi/omega"


def compare_driven_vs_effective(
    p: DriveParams,
    t_end: float,
    steps_per_period: int = 256,
    m_max: int = DEFAULT_M_MAX,
    method: str = "cf4",
) -> FloquetComparison:
    """Exact driven vs. effective populations from site 1, sampled once per drive period.

    Micromotion inside a period is outside the effective description, so
    only stroboscopic times ``k * 2 pi / omega <= t_end`` are compared.
    """
    n_periods = int(math.floor(t_end / p.period + 1e-12))
    if n_periods < 1:
        raise ValueError(f"t_end={t_end} is shorter than one drive period {p.period}")
    psi0 = basis_state(3, 0)
    exact = evolve_driven(
        driven_hamiltonian(p), psi0, n_periods * p.period, steps_per_period, method=method
    )
    ec = effective_couplings(p, m_max)
    eff = evolve_static(effective_hamiltonian(ec), psi0, exact.times)
    dev = float(np.max(np.abs(exact.records - eff.records)))
    return FloquetComparison(dev, exact, eff, ec)


def circulation_order(traj: Trajectory, threshold: float = 0.5) -> list[int]:
    """Sites other than the start, ordered by when they first exceed ``threshold``."""
    firsts = []
    for site in range(1, traj.n_sites):
        t = traj.first_peak_time(site, threshold)
        firsts.append((math.inf if t is None else t, site))
    return [s for _, s in sorted(firsts)]
