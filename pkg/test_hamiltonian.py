"""
Tests for the charge-basis Hamiltonian and its derivative operators
"""
import math

import numpy as np
import pytest
import scipy.linalg

from app.models.circuit import CircuitParams, HermitianMatrix, TruncationConfig
from app.models.errors import InvalidParameter, NonFiniteParameter
from app.services.hamiltonian_service import (
    build_hamiltonian,
    charge_derivative,
    critical_current_derivative,
    flux_derivative,
    hamiltonian_at,
)


def eigvals(params, ncut=30):
    return scipy.linalg.eigvalsh(hamiltonian_at(params, ncut).entries)


def test_three_state_matrix_at_zero_flux():
    h = build_hamiltonian(CircuitParams(ej_sum=20, ec=0.35), TruncationConfig(ncut=2)).entries
    assert h.shape == (5, 5)

    h = hamiltonian_at(CircuitParams(ej_sum=20, ec=0.35), 1).entries
    assert np.real(np.diag(h)) == pytest.approx(np.array([1.4, 0.0, 1.4]), abs=1e-12)
    assert h[1, 0] == pytest.approx(-10.0)
    assert h[0, 1] == pytest.approx(-10.0)
    assert h[0, 2] == 0
    assert np.all(np.imag(h) == 0)


def test_off_diagonal_convention_with_asymmetry():
    h = hamiltonian_at(CircuitParams(ej_sum=20, ec=0.35, d=0.1, phi_ext=0.25), 1).entries

    # <n+1|H|n> sits below the diagonal
    expected = -10 * math.cos(math.pi / 4) + 1j * math.sin(math.pi / 4)
    assert h[1, 0] == pytest.approx(expected, abs=1e-12)
    assert h[1, 0] == pytest.approx(complex(-7.0711, 0.7071), abs=1e-4)
    assert h[0, 1] == pytest.approx(expected.conjugate(), abs=1e-12)


def test_symmetric_squid_is_real():
    rng = np.random.default_rng(11)
    for _ in range(10):
        params = CircuitParams(
            ej_sum=rng.uniform(0, 50), ec=0.35, d=0.0, ng=rng.uniform(0, 1), phi_ext=rng.uniform(0, 1)
        )
        assert np.all(np.imag(hamiltonian_at(params, 10).entries) == 0)


def test_hermitian_for_random_parameters():
    rng = np.random.default_rng(7)
    for _ in range(50):
        params = CircuitParams(
            ej_sum=rng.uniform(0, 60),
            ec=rng.uniform(0.1, 1.0),
            d=rng.uniform(0, 0.2),
            ng=rng.uniform(-1, 1),
            phi_ext=rng.uniform(-1, 1),
        )
        ncut = int(rng.integers(2, 20))
        h = build_hamiltonian(params, TruncationConfig(ncut=ncut))
        assert h.dimension == 2 * ncut + 1
        assert np.allclose(h.entries, h.entries.conj().T, rtol=0, atol=1e-12)


def test_flux_period_is_one():
    for d in (0.0, 0.1, 0.2):
        params = CircuitParams(ej_sum=20, ec=0.35, d=d, ng=0.3, phi_ext=0.37)
        shifted = CircuitParams(ej_sum=20, ec=0.35, d=d, ng=0.3, phi_ext=1.37)
        assert eigvals(params) == pytest.approx(eigvals(shifted), abs=1e-9)


def test_offset_charge_reflection():
    params = CircuitParams(ej_sum=15, ec=0.35, d=0.1, ng=0.21, phi_ext=0.2)
    mirrored = CircuitParams(ej_sum=15, ec=0.35, d=0.1, ng=-0.21, phi_ext=0.2)
    assert eigvals(params, 10) == pytest.approx(eigvals(mirrored, 10), abs=1e-12)


def test_offset_charge_period_for_low_levels():
    params = CircuitParams(ej_sum=20, ec=0.35, ng=0.2)
    shifted = CircuitParams(ej_sum=20, ec=0.35, ng=1.2)
    assert eigvals(params)[:5] == pytest.approx(eigvals(shifted)[:5], abs=1e-10)


def test_flux_acts_as_effective_josephson_energy_when_symmetric():
    phi = 0.3
    tuned = CircuitParams(ej_sum=20, ec=0.35, d=0.0, ng=0.4, phi_ext=phi)
    effective = CircuitParams(ej_sum=20 * abs(math.cos(math.pi * phi)), ec=0.35, d=0.0, ng=0.4)
    assert eigvals(tuned) == pytest.approx(eigvals(effective), abs=1e-9)


def test_half_flux_is_computable():
    h = hamiltonian_at(CircuitParams(ej_sum=20, ec=0.35, d=0.1, phi_ext=0.5), 5)
    assert np.all(np.isfinite(h.entries))


def test_parameter_validation():
    with pytest.raises(NonFiniteParameter):
        CircuitParams(ej_sum=float("nan"), ec=0.35)
    with pytest.raises(NonFiniteParameter):
        CircuitParams(ej_sum=20, ec=0.35, phi_ext=float("inf"))
    with pytest.raises(InvalidParameter, match="0 <= d < 1"):
        CircuitParams(ej_sum=20, ec=0.35, d=1.5)
    with pytest.raises(InvalidParameter):
        CircuitParams(ej_sum=-1, ec=0.35)
    with pytest.raises(InvalidParameter):
        CircuitParams(ej_sum=20, ec=0.0)
    with pytest.raises(InvalidParameter):
        TruncationConfig(ncut=1)
    with pytest.raises(InvalidParameter):
        TruncationConfig(convergence_tol_ghz=-1e-3)


def test_matrix_must_be_hermitian():
    with pytest.raises(InvalidParameter, match="not Hermitian"):
        HermitianMatrix(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(InvalidParameter):
        HermitianMatrix(np.zeros((2, 3)))


def test_derivative_operators_match_matrix_differences():
    params = CircuitParams(ej_sum=20, ec=0.35, d=0.1, ng=0.3, phi_ext=0.2)
    eps = 1e-6
    ncut = 8

    def h(**changes):
        values = dict(ej_sum=20, ec=0.35, d=0.1, ng=0.3, phi_ext=0.2)
        values.update(changes)
        return hamiltonian_at(CircuitParams(**values), ncut).entries

    charge = (h(ng=0.3 + eps) - h(ng=0.3 - eps)) / (2 * eps)
    assert np.allclose(charge_derivative(params, ncut), charge, atol=1e-6)

    flux = (h(phi_ext=0.2 + eps) - h(phi_ext=0.2 - eps)) / (2 * eps)
    assert np.allclose(flux_derivative(params, ncut), flux, atol=1e-6)

    # EJ_sum -> EJ_sum * (1 + delta) is linear in delta
    ic = (h(ej_sum=20 * (1 + eps)) - h(ej_sum=20 * (1 - eps))) / (2 * eps)
    assert np.allclose(critical_current_derivative(params, ncut), ic, atol=1e-6)
