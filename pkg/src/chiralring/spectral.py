"""Dense Hermitian linear algebra shared by every model in the package.

All matrix exponentials go through the spectral decomposition, so every
propagator is unitary up to round-off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10


class NonHermitianError(ValueError):
    """Raised when an operator fails the Hermiticity check."""

    def __init__(self, asymmetry: float, tol: float = HERMITIAN_TOL):
        self.asymmetry = asymmetry
        super().__init__(
            f"operator is not Hermitian: max |H[m,n] - conj(H[n,m])| = "
            f"{asymmetry:.3e} exceeds {tol:.1e}"
        )


def as_square(matrix) -> np.ndarray:
    """Return ``matrix`` as a complex square ndarray, or raise ``ValueError``."""
    h = np.asarray(matrix, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {h.shape}")
    return h


def hermitian_asymmetry(matrix) -> float:
    h = as_square(matrix)
    return float(np.max(np.abs(h - h.conj().T)))


def check_hermitian(matrix, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate Hermiticity entrywise and return the matrix as a complex array."""
    h = as_square(matrix)
    asym = hermitian_asymmetry(h)
    if asym > tol:
        raise NonHermitianError(asym, tol)
    return h


@dataclass(frozen=True)
class EigenSystem:
    """Ascending real eigenvalues and the matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    # Largest-magnitude component of each column made real-positive; the first
    # such component wins on ties (argmax semantics).
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        mags = np.abs(col)
        j = int(np.argmax(np.round(mags, 12)))
        out[:, k] = col * (np.conj(col[j]) / mags[j])
    return out


def hermitian_eig(matrix, tol: float = HERMITIAN_TOL) -> EigenSystem:
    """Diagonalize a Hermitian matrix.

    Eigenvalues are returned ascending; each eigenvector is phase-fixed so
    that its largest-magnitude component is real and positive, which makes
    the output deterministic for identical input.
    """
    h = check_hermitian(matrix, tol)
    # Symmetrize so the solver sees an exactly Hermitian input.
    h = 0.5 * (h + h.conj().T)
    vals, vecs = np.linalg.eigh(h)
    vals.setflags(write=False)
    vecs = _fix_phases(vecs)
    vecs.setflags(write=False)
    return EigenSystem(vals, vecs)


def propagator(eig: EigenSystem, t: float) -> np.ndarray:
    """Return ``exp(-i H t) = V diag(exp(-i E t)) V^dagger``."""
    if not np.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    v = eig.eigenvectors
    return (v * np.exp(-1j * eig.eigenvalues * t)) @ v.conj().T


def expm_hermitian(matrix, t: float) -> np.ndarray:
    """Shorthand for ``propagator(hermitian_eig(matrix), t)``."""
    return propagator(hermitian_eig(matrix), t)


def apply(u, psi) -> np.ndarray:
    """Matrix-vector product with a dimension check."""
    u = as_square(u)
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.shape[0] != u.shape[0]:
        raise ValueError(
            f"state of length {psi.shape} does not match operator dimension {u.shape[0]}"
        )
    return u @ psi


def basis_state(dim: int, site: int) -> np.ndarray:
    """Unit vector on ``site`` (0-based)."""
    if not 0 <= site < dim:
        raise ValueError(f"site {site} out of range for dimension {dim}")
    psi = np.zeros(dim, dtype=complex)
    psi[site] = 1.0
    return psi


def unitarity_defect(u) -> float:
    u = as_square(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
