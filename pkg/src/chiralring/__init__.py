"""Numerical laboratory for perfect chiral circulation on few-site rings."""

__version__ = "0.1.0"

from .ring import RingSpec, build_ideal, loop_flux, reverse, apply_gauge  # noqa: E402
from .spectral import hermitian_eig, propagator  # noqa: E402
from .dynamics import average_fidelity, evolve_static, evolve_driven, step_fidelity  # noqa: E402

__all__ = [
    "RingSpec",
    "build_ideal",
    "loop_flux",
    "reverse",
    "apply_gauge",
    "hermitian_eig",
    "propagator",
    "average_fidelity",
    "evolve_static",
    "evolve_driven",
    "step_fidelity",
]
