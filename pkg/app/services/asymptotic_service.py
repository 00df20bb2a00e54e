"""
Closed-form scaling laws for T2 versus EJ/Ec, calibrated against numeric reference points.

    charge:            T2 ~ exp(sqrt(EJ_sum / Ec))
    flux:              T2 ~ (2 Ec EJ_sum)^(-1/2)
    critical current:  T2 ~ EJ_sum^(-1/2)   (Ic proportional to EJ_sum, Ec fixed)
"""
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.linear_model import LinearRegression

from app.models.circuit import CircuitParams
from app.models.errors import GridMismatch, NonFiniteParameter, UnboundedReference
from app.models.noise import AsymptoticKind, AsymptoticModel, ChannelKind, T2Result

CHANNEL_LAWS = {
    ChannelKind.CHARGE: AsymptoticKind.CHARGE_EXP,
    ChannelKind.FLUX: AsymptoticKind.FLUX_INV_SQRT,
    ChannelKind.CRITICAL_CURRENT: AsymptoticKind.IC_INV_SQRT,
}


def shape(kind: AsymptoticKind, params: CircuitParams) -> float:
    if kind is AsymptoticKind.CHARGE_EXP:
        return math.exp(math.sqrt(params.ej_sum / params.ec))
    if kind is AsymptoticKind.FLUX_INV_SQRT:
        return (2.0 * params.ec * params.ej_sum) ** -0.5
    return params.ej_sum ** -0.5


def calibrate(
    kind: AsymptoticKind,
    reference_params: CircuitParams,
    reference_t2: float,
    reference_result: Optional[T2Result] = None,
) -> AsymptoticModel:
    """Fix the prefactor so the law passes through (reference_params, reference_t2)."""
    if math.isnan(reference_t2) or math.isinf(reference_t2) or reference_t2 <= 0:
        raise UnboundedReference(f"cannot calibrate {kind.value} on T2 = {reference_t2!r}")
    if reference_params.ej_sum <= 0:
        raise UnboundedReference(f"{kind.value} law is singular at ej_sum = 0")

    reference_shape = shape(kind, reference_params)
    prefactor = reference_t2 / reference_shape
    if not math.isfinite(prefactor) or prefactor <= 0:
        raise UnboundedReference(f"{kind.value} prefactor {prefactor!r} is not positive and finite")

    return AsymptoticModel(
        kind=kind,
        prefactor=prefactor,
        reference_params=reference_params,
        reference_t2=reference_t2,
        reference_shape=reference_shape,
        reference_result=reference_result,
    )


def evaluate(model: AsymptoticModel, params: CircuitParams) -> float:
    """prefactor * shape(params), written relative to the reference so it is exact there."""
    value = model.reference_t2 * (shape(model.kind, params) / model.reference_shape)
    if not math.isfinite(value):
        raise NonFiniteParameter(f"{model.kind.value} law is not finite at EJ/Ec = {params.ratio!r}")
    return value


def percent_error(
    numeric: Sequence[Tuple[float, float]],
    asymptotic: Sequence[Tuple[float, float]],
) -> List[Tuple[float, float]]:
    """100 |numeric - asymptotic| / numeric per x; Unbounded values never yield NaN."""
    xs = [x for x, _ in numeric]
    if xs != [x for x, _ in asymptotic]:
        raise GridMismatch("numeric and asymptotic series must share the same x-grid")
    if any(b < a for a, b in zip(xs, xs[1:])):
        raise GridMismatch("x-grid must be sorted ascending")

    errors = []
    for (x, value), (_, model_value) in zip(numeric, asymptotic):
        errors.append((x, _percent(value, model_value)))
    return errors


def _percent(value: float, model_value: float) -> float:
    if math.isinf(value):
        return 0.0 if math.isinf(model_value) else 100.0
    if math.isinf(model_value):
        return math.inf
    return 100.0 * abs(value - model_value) / value


def fit_trend(x: Sequence[float], y: Sequence[float]) -> Tuple[float, float, float]:
    """Least-squares line y = slope*x + intercept; returns (slope, intercept, r2)."""
    X = np.asarray(x, dtype=np.float64).reshape(-1, 1)
    y = np.asarray(y, dtype=np.float64)

    model = LinearRegression()
    model.fit(X, y)
    r2 = model.score(X, y)
    return float(model.coef_[0]), float(model.intercept_), float(r2)
