"""
Charge-basis Hamiltonian of the SQUID transmon and its parameter derivatives.

The junction term is evaluated in the pole-free form

    -EJ_sum * [cos(pi phi_ext) cos(phi) + d sin(pi phi_ext) sin(phi)]

with cos(phi) = (S+ + S-)/2, sin(phi) = (S+ - S-)/(2i) and S+|n> = |n+1>.
"""
import math

import numpy as np

from app.models.circuit import CircuitParams, HermitianMatrix, TruncationConfig


def charge_states(ncut: int) -> np.ndarray:
    """Cooper-pair numbers -ncut..ncut."""
    return np.arange(-ncut, ncut + 1, dtype=np.float64)


def _junction_operator(cos_coeff: float, sin_coeff: float, ncut: int) -> np.ndarray:
    """Matrix of cos_coeff*cos(phi) + sin_coeff*sin(phi); <n+1|.|n> sits at [k+1, k]."""
    dim = 2 * ncut + 1
    hop = complex(cos_coeff / 2, -sin_coeff / 2)
    op = np.zeros((dim, dim), dtype=np.complex128)
    idx = np.arange(dim - 1)
    op[idx + 1, idx] = hop
    op[idx, idx + 1] = hop.conjugate()
    return op


def _charging_diagonal(params: CircuitParams, ncut: int) -> np.ndarray:
    return 4.0 * params.ec * (charge_states(ncut) - params.ng) ** 2


def build_hamiltonian(params: CircuitParams, trunc: TruncationConfig) -> HermitianMatrix:
    """Hamiltonian matrix in GHz on the truncated charge basis."""
    return hamiltonian_at(params, trunc.ncut)


def hamiltonian_at(params: CircuitParams, ncut: int) -> HermitianMatrix:
    phase = math.pi * params.phi_ext
    junction = _junction_operator(math.cos(phase), params.d * math.sin(phase), ncut)
    entries = np.diag(_charging_diagonal(params, ncut)).astype(np.complex128) - params.ej_sum * junction
    return HermitianMatrix(entries)


# =====================
# DERIVATIVE OPERATORS
# =====================

def charge_derivative(params: CircuitParams, ncut: int) -> np.ndarray:
    """dH/dng = -8 Ec (n - ng)."""
    return np.diag(-8.0 * params.ec * (charge_states(ncut) - params.ng)).astype(np.complex128)


def flux_derivative(params: CircuitParams, ncut: int) -> np.ndarray:
    """dH/dphi_ext = -EJ_sum * pi * [-sin(pi phi) cos(phi) + d cos(pi phi) sin(phi)]."""
    phase = math.pi * params.phi_ext
    return -params.ej_sum * math.pi * _junction_operator(-math.sin(phase), params.d * math.cos(phase), ncut)


def critical_current_derivative(params: CircuitParams, ncut: int) -> np.ndarray:
    """dH/d(delta) for EJ_sum -> EJ_sum*(1 + delta) at delta = 0: the full junction term."""
    phase = math.pi * params.phi_ext
    return -params.ej_sum * _junction_operator(math.cos(phase), params.d * math.sin(phase), ncut)
