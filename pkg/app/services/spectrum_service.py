"""
Diagonalization of the charge-basis Hamiltonian and the spectral quantities built on it.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Callable, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import minimize_scalar

from app.config.settings import (
    DEFAULT_DISPERSION_POINTS,
    DEFAULT_N_LEVELS,
    DEGENERACY_GAP_GHZ,
    GOLDEN_XTOL,
    MAX_NCUT_ESCALATIONS,
    MIN_DISPERSION_POINTS,
    NCUT_STEP,
)
from app.models.circuit import CircuitParams, HermitianMatrix, TruncationConfig
from app.models.errors import DegeneratePair, InvalidParameter, NoConvergence, SolverFailure
from app.models.noise import DispersionResult, SpectrumResult
from app.services.hamiltonian_service import charge_derivative, hamiltonian_at
from app.services.logger import logger


def eigensystem(h: HermitianMatrix, n_levels: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Lowest n_levels eigenpairs, ascending.

    Energies are Rayleigh quotients of the LAPACK eigenvectors, so their rounding
    scales with <|H|> of the state rather than with the norm of the whole matrix.
    Vectors are columns of the returned array.
    """
    if n_levels < 1 or n_levels > h.dimension:
        raise InvalidParameter(f"n_levels must lie in [1, {h.dimension}], got {n_levels}")
    try:
        _, vectors = scipy.linalg.eigh(h.entries, subset_by_index=[0, n_levels - 1], check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise SolverFailure(f"eigen-decomposition failed: {e}") from e

    energies = np.real(np.einsum("ik,ij,jk->k", vectors.conj(), h.entries, vectors))
    if not np.all(np.isfinite(energies)):
        raise SolverFailure("eigen-decomposition returned non-finite energies")
    order = np.argsort(energies, kind="stable")
    return energies[order], vectors[:, order]


def eigen_spectrum(h: HermitianMatrix, n_levels: int = DEFAULT_N_LEVELS) -> SpectrumResult:
    """Ascending energies plus E01, E12 and the anharmonicity."""
    if n_levels < 3:
        raise InvalidParameter(f"n_levels must be >= 3, got {n_levels}")
    energies, _ = eigensystem(h, n_levels)
    return SpectrumResult.from_energies([float(e) for e in energies])


def spectrum_at(params: CircuitParams, ncut: int, n_levels: int = DEFAULT_N_LEVELS) -> SpectrumResult:
    return eigen_spectrum(hamiltonian_at(params, ncut), n_levels)


def e01_at(params: CircuitParams, ncut: int) -> float:
    energies, _ = eigensystem(hamiltonian_at(params, ncut), 2)
    return float(energies[1] - energies[0])


def expectation_gap(params: CircuitParams, ncut: int, operator: np.ndarray) -> float:
    """<1|op|1> - <0|op|0>; with op = dH/dlambda this is dE01/dlambda."""
    energies, vectors = eigensystem(hamiltonian_at(params, ncut), 2)
    if energies[1] - energies[0] < DEGENERACY_GAP_GHZ:
        raise DegeneratePair(
            f"E01 = {energies[1] - energies[0]:.3e} GHz at ng={params.ng!r}, phi_ext={params.phi_ext!r}; "
            "perturb ng to lift the degeneracy"
        )
    v0, v1 = vectors[:, 0], vectors[:, 1]
    return float(np.real(np.vdot(v1, operator @ v1) - np.vdot(v0, operator @ v0)))


def converge_ncut(params: CircuitParams, trunc: TruncationConfig) -> int:
    """
    Smallest ncut in trunc.ncut, trunc.ncut+5, ... whose E01 moves by less than
    convergence_tol_ghz when the basis grows by 5 more charge states.
    """
    ncut = trunc.ncut
    current = e01_at(params, ncut)
    for _ in range(MAX_NCUT_ESCALATIONS):
        larger = e01_at(params, ncut + NCUT_STEP)
        if abs(larger - current) < trunc.convergence_tol_ghz:
            logger.debug(f"ncut converged at {ncut} (|dE01| = {abs(larger - current):.2e} GHz)")
            return ncut
        ncut += NCUT_STEP
        previous, current = current, larger

    raise NoConvergence(
        f"E01 did not converge to {trunc.convergence_tol_ghz!r} GHz by ncut = {ncut}",
        last_e01=current,
        previous_e01=previous,
        ncut=ncut,
    )


def transition_energy(params: CircuitParams, trunc: TruncationConfig, i: int = 0, j: int = 1) -> float:
    """E_j - E_i in GHz at a converged cutoff."""
    if not 0 <= i < j <= 2:
        raise InvalidParameter(f"levels must satisfy 0 <= i < j <= 2, got i={i}, j={j}")
    ncut = converge_ncut(params, trunc)
    spectrum = spectrum_at(params, ncut, max(DEFAULT_N_LEVELS, j + 1))
    return spectrum.energies[j] - spectrum.energies[i]


# =====================
# SEARCH HELPERS
# =====================

def golden_refine(
    objective: Callable[[float], float],
    grid: Sequence[float],
    values: Sequence[float],
    index: int,
) -> Tuple[float, float, bool]:
    """
    Golden-section search for the maximum of objective around grid[index].

    The grid neighbours form the bracket. Returns (x, value, refined); when the bracket
    is not strict, or the objective fails inside it, the grid point is returned unchanged.
    """
    x_grid, v_grid = float(grid[index]), float(values[index])
    if index <= 0 or index >= len(grid) - 1:
        return x_grid, v_grid, False

    bracket = (float(grid[index - 1]), x_grid, float(grid[index + 1]))
    try:
        result = minimize_scalar(
            lambda x: -objective(float(x)),
            bracket=bracket,
            method="golden",
            options={"xtol": GOLDEN_XTOL},
        )
    except (ValueError, RuntimeError, DegeneratePair) as e:
        logger.debug(f"golden-section refinement skipped at x={x_grid!r}: {e}")
        return x_grid, v_grid, False

    x_best, v_best = float(result.x), float(-result.fun)
    if not (bracket[0] <= x_best <= bracket[2]) or v_best < v_grid:
        return x_grid, v_grid, False
    return x_best, v_best, True


def charge_dispersion(
    params: CircuitParams,
    trunc: TruncationConfig,
    grid_points: int = DEFAULT_DISPERSION_POINTS,
    max_workers: int = 1,
) -> DispersionResult:
    """
    Peak-to-peak E01 over ng in [0, 0.5] and the steepest |dE01/dng|.

    E01 is even and 1-periodic in ng, so the half interval covers a full period and the
    slope vanishes at both ends.
    """
    if grid_points < MIN_DISPERSION_POINTS:
        raise InvalidParameter(f"grid_points must be >= {MIN_DISPERSION_POINTS}, got {grid_points}")

    ncut = converge_ncut(params, trunc)
    grid = np.linspace(0.0, 0.5, grid_points)

    def e01_of(ng: float) -> float:
        return e01_at(replace(params, ng=float(ng)), ncut)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            values = np.array(list(executor.map(e01_of, grid)))
    else:
        values = np.array([e01_of(ng) for ng in grid])

    epsilon01 = float(np.max(values) - np.min(values))

    step = grid[1] - grid[0]
    slopes = np.zeros_like(values)
    slopes[1:-1] = np.abs(values[2:] - values[:-2]) / (2.0 * step)
    index = int(np.argmax(slopes))

    def charge_slope(ng: float) -> float:
        point = replace(params, ng=ng)
        return abs(expectation_gap(point, ncut, charge_derivative(point, ncut)))

    # the grid value compared against must come from the same estimator as the refinement
    reference = slopes.copy()
    reference[index] = charge_slope(float(grid[index]))
    ng_star, max_slope, refined = golden_refine(charge_slope, grid, reference, index)
    if not refined and slopes[index] > 0:
        logger.debug(f"charge slope kept at grid resolution (ng = {ng_star:.4f})")

    return DispersionResult(
        epsilon01=epsilon01,
        max_slope=max_slope,
        argmax_ng=float(np.clip(ng_star, 0.0, 0.5)),
    )
