"""
Noise sensitivity: dE01/dlambda per channel, 1/f dephasing times and rate budgets.

With E01 kept as E/h in GHz, T2 = hbar / (A |dE01/dlambda|) becomes
T2 = 1 / (2 pi A |dnu01/dlambda| 1e9) seconds; with h in place of hbar the 2 pi drops out.
"""
import math
from dataclasses import replace
from typing import Dict, Iterable, Optional

import numpy as np

from app.config.settings import (
    DEFAULT_METHODS,
    FD_STEPS,
    FLUX_SCAN_CAP,
    FLUX_SCAN_POINTS,
    GHZ,
    PLANCK_FACTORS,
    SLOPE_FLOOR,
)
from app.models.circuit import CircuitParams, TruncationConfig
from app.models.errors import AmplitudeOutOfRange, DegeneratePair, StepUnderflow
from app.models.noise import (
    UNBOUNDED,
    ChannelKind,
    NoiseChannel,
    OperatingPoint,
    PlanckConvention,
    Policy,
    RateBudget,
    SlopeMethod,
    T2Result,
)
from app.services.hamiltonian_service import (
    charge_derivative,
    critical_current_derivative,
    flux_derivative,
)
from app.services.logger import logger
from app.services.spectrum_service import (
    charge_dispersion,
    converge_ncut,
    e01_at,
    expectation_gap,
    golden_refine,
)

_DERIVATIVES = {
    ChannelKind.CHARGE: charge_derivative,
    ChannelKind.FLUX: flux_derivative,
    ChannelKind.CRITICAL_CURRENT: critical_current_derivative,
}


def _variable(params: CircuitParams, kind: ChannelKind) -> float:
    if kind is ChannelKind.CHARGE:
        return params.ng
    if kind is ChannelKind.FLUX:
        return params.phi_ext
    # fractional common-mode deviation delta, evaluated at delta = 0
    return 0.0


def _shifted(params: CircuitParams, kind: ChannelKind, value: float) -> CircuitParams:
    if kind is ChannelKind.CHARGE:
        return replace(params, ng=value)
    if kind is ChannelKind.FLUX:
        return replace(params, phi_ext=value)
    return replace(params, ej_sum=params.ej_sum * (1.0 + value))


def _biased(params: CircuitParams, point: OperatingPoint) -> CircuitParams:
    return replace(params, ng=point.ng, phi_ext=point.phi_ext)


def resolve_point(
    params: CircuitParams,
    trunc: TruncationConfig,
    kind: ChannelKind,
    point: OperatingPoint,
) -> OperatingPoint:
    """Return point unchanged when resolved, otherwise run the worst-case scan from it."""
    if point.is_resolved:
        return point
    return worst_case_point(_biased(params, point), trunc, kind)


# =====================
# SLOPES
# =====================

def finite_difference_slope(biased: CircuitParams, ncut: int, kind: ChannelKind) -> float:
    """
    |dE01/dlambda| from the 5-point central stencil at steps h and 2h,
    combined by one Richardson extrapolation (the stencil error is O(h^4)).
    """
    h = FD_STEPS[kind.value]
    x0 = _variable(biased, kind)
    if h < 64 * np.spacing(abs(x0)):
        raise StepUnderflow(f"{kind.value} step {h!r} is below the resolution of lambda = {x0!r}")

    samples: Dict[int, float] = {}

    def e01(k: int) -> float:
        if k not in samples:
            samples[k] = e01_at(_shifted(biased, kind, x0 + k * h), ncut)
        return samples[k]

    def stencil(m: int) -> float:
        return (e01(-2 * m) - 8.0 * e01(-m) + 8.0 * e01(m) - e01(2 * m)) / (12.0 * m * h)

    fine, coarse = stencil(1), stencil(2)
    return abs(fine + (fine - coarse) / 15.0)


def slope_fd(
    params: CircuitParams,
    trunc: TruncationConfig,
    kind: ChannelKind,
    point: OperatingPoint,
) -> float:
    """Finite-difference |dE01/dlambda| in GHz per unit lambda."""
    biased = _biased(params, resolve_point(params, trunc, kind, point))
    ncut = converge_ncut(biased, trunc)
    return finite_difference_slope(biased, ncut, kind)


def slope_hf(
    params: CircuitParams,
    trunc: TruncationConfig,
    kind: ChannelKind,
    point: OperatingPoint,
) -> float:
    """Hellmann-Feynman |<1|dH|1> - <0|dH|0>| in GHz per unit lambda."""
    biased = _biased(params, resolve_point(params, trunc, kind, point))
    ncut = converge_ncut(biased, trunc)
    operator = _DERIVATIVES[kind](biased, ncut)
    return abs(expectation_gap(biased, ncut, operator))


def worst_case_point(params: CircuitParams, trunc: TruncationConfig, kind: ChannelKind) -> OperatingPoint:
    """
    Bias that maximizes |dE01/dlambda| over the channel's own half period,
    holding the other variables at their values in params.
    """
    if kind is ChannelKind.CHARGE:
        dispersion = charge_dispersion(params, trunc)
        logger.info(f"Worst-case charge bias ng = {dispersion.argmax_ng:.6f} (slope {dispersion.max_slope:.3e} GHz)")
        return OperatingPoint(
            ng=dispersion.argmax_ng,
            phi_ext=params.phi_ext,
            policy=Policy.WORST_CASE,
            resolved=True,
        )

    if kind is ChannelKind.FLUX:
        return _worst_case_flux(params, trunc)

    # no scan: the caller's bias is returned as a fixed point
    return OperatingPoint(ng=params.ng, phi_ext=params.phi_ext, policy=Policy.FIXED, resolved=True)


def _worst_case_flux(params: CircuitParams, trunc: TruncationConfig) -> OperatingPoint:
    ncut = converge_ncut(params, trunc)

    def flux_slope(phi: float) -> float:
        point = replace(params, phi_ext=phi)
        return abs(expectation_gap(point, ncut, flux_derivative(point, ncut)))

    def flux_slope_or_zero(phi: float) -> float:
        try:
            return flux_slope(phi)
        except DegeneratePair:
            return 0.0

    # the slope of a symmetric SQUID diverges towards phi_ext = 0.5; stop short of it
    grid = np.linspace(0.0, FLUX_SCAN_CAP, FLUX_SCAN_POINTS)
    values = np.array([flux_slope_or_zero(float(phi)) for phi in grid])
    index = int(np.argmax(values))
    phi_star, slope, _ = golden_refine(flux_slope, grid, values, index)
    clamped = index == len(grid) - 1

    if clamped:
        logger.warning(f"Flux scan clamped at phi_ext = {phi_star:.4f} (d = {params.d!r})")
    else:
        logger.info(f"Worst-case flux bias phi_ext = {phi_star:.6f} (slope {slope:.3e} GHz/Phi0)")
    return OperatingPoint(
        ng=params.ng,
        phi_ext=phi_star,
        policy=Policy.WORST_CASE,
        resolved=True,
        clamped=clamped,
    )


# =====================
# DEPHASING TIMES
# =====================

def t2_from_slope(amplitude: float, slope: float, planck: PlanckConvention = PlanckConvention.HBAR) -> float:
    """Seconds, for an amplitude in units of lambda and a slope in GHz per unit lambda."""
    if slope < SLOPE_FLOOR:
        return UNBOUNDED
    return 1.0 / (PLANCK_FACTORS[planck.value] * amplitude * slope * GHZ)


def t2_pure(
    params: CircuitParams,
    trunc: TruncationConfig,
    channel: NoiseChannel,
    point: OperatingPoint,
    method: Optional[SlopeMethod] = None,
    allow_amplitude_override: bool = False,
) -> T2Result:
    """1/f dephasing time of one channel at a fixed or worst-case operating point."""
    if not allow_amplitude_override and not channel.in_table_range():
        raise AmplitudeOutOfRange(
            f"{channel.kind.value} amplitude {channel.amplitude!r} is outside the tabulated 1/f range"
        )
    method = method or SlopeMethod(DEFAULT_METHODS[channel.kind.value])

    resolved = resolve_point(params, trunc, channel.kind, point)
    if method is SlopeMethod.HELLMANN_FEYNMAN:
        slope = slope_hf(params, trunc, channel.kind, resolved)
    else:
        slope = slope_fd(params, trunc, channel.kind, resolved)

    return T2Result(
        channel=channel,
        slope=slope,
        t2_seconds=t2_from_slope(channel.lambda_amplitude, slope, channel.planck),
        point=resolved,
        method=method,
    )


def _rate(seconds: float, weight: float = 1.0) -> float:
    return 0.0 if math.isinf(seconds) else 1.0 / (weight * seconds)


def combine_rates(budget: RateBudget) -> float:
    """T2 from 1/T2 = 1/(2 T1) + 1/T_phi; Unbounded when both rates vanish."""
    total = _rate(budget.t1_seconds, 2.0) + _rate(budget.t_phi_seconds)
    return UNBOUNDED if total == 0.0 else 1.0 / total


def combine_channels(results: Iterable[T2Result]) -> float:
    """Pure dephasing time with every channel acting at once: rates add."""
    total = sum(_rate(result.t2_seconds) for result in results)
    return UNBOUNDED if total == 0.0 else 1.0 / total
