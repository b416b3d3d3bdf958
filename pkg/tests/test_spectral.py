import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from chiralring.spectral import (
    NonHermitianError,
    apply,
    basis_state,
    check_hermitian,
    expm_hermitian,
    hermitian_eig,
    propagator,
    unitarity_defect,
)

from conftest import random_hermitian


def test_rejects_non_hermitian():
    m = np.array([[0, 1], [0, 0]], dtype=complex)
    with pytest.raises(NonHermitianError) as err:
        hermitian_eig(m)
    assert err.value.asymmetry == pytest.approx(1.0)


def test_rejects_non_square():
    with pytest.raises(ValueError):
        check_hermitian(np.zeros((2, 3)))


def test_pauli_x_spectrum():
    eig = hermitian_eig(np.array([[0, 1], [1, 0]], dtype=complex))
    assert np.allclose(eig.eigenvalues, [-1, 1])
    assert np.allclose(eig.reconstruct(), [[0, 1], [1, 0]])


def test_eigenvector_phase_fix_makes_largest_component_real_positive(rng):
    eig = hermitian_eig(random_hermitian(rng, 6))
    for col in eig.eigenvectors.T:
        k = np.argmax(np.abs(col))
        assert abs(col[k].imag) < 1e-14 and col[k].real > 0


def test_eigensystem_is_read_only(rng):
    eig = hermitian_eig(random_hermitian(rng, 3))
    with pytest.raises(ValueError):
        eig.eigenvalues[0] = 1.0


@settings(max_examples=40, deadline=None)
@given(dim=st.integers(1, 8), seed=st.integers(0, 2**31), t=st.floats(-20, 20))
def test_propagator_matches_scipy_expm_and_is_unitary(dim, seed, t):
    h = random_hermitian(np.random.default_rng(seed), dim)
    u = propagator(hermitian_eig(h), t)
    assert np.allclose(u, expm(-1j * h * t), atol=1e-10)
    assert unitarity_defect(u) < 1e-10


@settings(max_examples=30, deadline=None)
@given(dim=st.integers(1, 8), seed=st.integers(0, 2**31))
def test_reconstruction_round_trip(dim, seed):
    h = random_hermitian(np.random.default_rng(seed), dim)
    assert np.allclose(hermitian_eig(h).reconstruct(), h, atol=1e-12)


def test_propagator_at_zero_time_is_identity(rng):
    assert np.allclose(expm_hermitian(random_hermitian(rng, 4), 0.0), np.eye(4))


def test_propagator_rejects_non_finite_time(rng):
    eig = hermitian_eig(random_hermitian(rng, 2))
    with pytest.raises(ValueError):
        propagator(eig, float("nan"))


def test_apply_checks_dimensions():
    with pytest.raises(ValueError):
        apply(np.eye(3), np.ones(2))


def test_basis_state_bounds():
    assert np.array_equal(basis_state(3, 1), [0, 1, 0])
    with pytest.raises(ValueError):
        basis_state(3, 3)
