"""
Service for EJ/Ec sweeps, asymptotic overlays and the working-point T2 report.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional

import numpy as np

from app.config.settings import (
    CHARGE_UNIT_SCALE,
    DEFAULT_ASYMMETRY,
    DEFAULT_EC,
    DEFAULT_EJ_SUM,
    DEFAULT_NG,
    DEFAULT_PHI_EXT,
    MAX_WORKERS,
    TABLE2_TARGETS,
)
from app.models.circuit import CircuitParams, TruncationConfig
from app.models.errors import NonFiniteParameter, SweepRowFailure, UnboundedReference
from app.models.noise import (
    ChannelKind,
    ChargeUnit,
    NoiseChannel,
    OperatingPoint,
    PlanckConvention,
    Policy,
    SlopeMethod,
)
from app.models.sweep import ALL_CHANNELS, ChannelColumns, SweepRow, SweepSpec, Table2Report
from app.services.asymptotic_service import CHANNEL_LAWS, calibrate, evaluate, fit_trend, percent_error
from app.services.cache import SweepCache
from app.services.logger import StatusLogger, logger
from app.services.noise_service import t2_pure
from app.services.spectrum_service import converge_ncut, spectrum_at

IC_FIT_RANGE = (30.0, 150.0)


class SweepService:
    """Runs T2 sweeps over EJ_sum/Ec at fixed Ec."""

    def __init__(
        self,
        max_workers: int = MAX_WORKERS,
        status: Optional[StatusLogger] = None,
        cache: Optional[SweepCache] = None,
    ):
        self.max_workers = max(1, int(max_workers))
        self.status = status or StatusLogger()
        self.cache = cache

    @staticmethod
    def ratios(spec: SweepSpec) -> np.ndarray:
        """Ascending EJ/Ec grid; both ends are hit exactly."""
        if spec.spacing == "log":
            grid = np.geomspace(spec.ratio_min, spec.ratio_max, spec.points)
        else:
            grid = np.linspace(spec.ratio_min, spec.ratio_max, spec.points)
        grid[0], grid[-1] = spec.ratio_min, spec.ratio_max
        return grid

    @staticmethod
    def row_params(spec: SweepSpec, ratio: float) -> CircuitParams:
        return CircuitParams(ej_sum=ratio * spec.ec, ec=spec.ec, d=spec.d, ng=spec.ng, phi_ext=spec.phi_ext)

    def compute_row(self, spec: SweepSpec, ratio: float) -> SweepRow:
        """Spectrum and per-channel T2 at one ratio; asymptotic columns are filled later."""
        params = self.row_params(spec, ratio)
        trunc = TruncationConfig(ncut=spec.ncut, convergence_tol_ghz=spec.convergence_tol_ghz)

        spectrum = spectrum_at(params, converge_ncut(params, trunc))
        channels: Dict[ChannelKind, ChannelColumns] = {}
        for kind in spec.channels:
            result = t2_pure(
                params,
                trunc,
                NoiseChannel(kind, spec.amplitudes[kind], spec.charge_unit, spec.planck[kind]),
                OperatingPoint(ng=spec.ng, phi_ext=spec.phi_ext, policy=spec.policies[kind]),
                method=spec.methods[kind],
                allow_amplitude_override=spec.allow_amplitude_override,
            )
            channels[kind] = ChannelColumns(slope=result.slope, t2_seconds=result.t2_seconds)

        return SweepRow(
            ratio=float(ratio),
            ej_sum=params.ej_sum,
            e01=spectrum.e01,
            anharmonicity=spectrum.anharmonicity,
            channels=channels,
        )

    def run_sweep(self, spec: SweepSpec) -> List[SweepRow]:
        """Rows in ascending ratio, with asymptotic overlays and percent errors attached."""
        if self.cache is not None:
            cached = self.cache.get_cached_rows(spec)
            if cached is not None:
                return cached

        grid = self.ratios(spec)
        total = len(grid)
        logger.info(f"Sweeping {total} points of EJ/Ec over [{spec.ratio_min}, {spec.ratio_max}] ({spec.spacing})")

        rows: List[SweepRow] = []
        executor = ThreadPoolExecutor(max_workers=self.max_workers)
        try:
            futures = [executor.submit(self.compute_row, spec, float(ratio)) for ratio in grid]

            # Collect results in submission order
            for idx, future in enumerate(futures):
                try:
                    rows.append(future.result())
                except Exception as e:
                    self.status.error(f"Row at EJ/Ec = {grid[idx]:.6g} failed: {e}", exc_info=True)
                    executor.shutdown(wait=False, cancel_futures=True)
                    raise SweepRowFailure(float(grid[idx]), e) from e
                self.status.update(f"EJ/Ec = {grid[idx]:.4g}", idx + 1, total)
        finally:
            executor.shutdown(wait=True)

        self._attach_asymptotics(spec, rows)

        if self.cache is not None:
            self.cache.cache_rows(spec, rows)
        return rows

    def _reference_index(self, spec: SweepSpec, rows: List[SweepRow]) -> int:
        target = spec.reference_ratio
        if not spec.ratio_min <= target <= spec.ratio_max:
            target = 0.5 * (spec.ratio_min + spec.ratio_max)
        return int(np.argmin([abs(row.ratio - target) for row in rows]))

    def _attach_asymptotics(self, spec: SweepSpec, rows: List[SweepRow]) -> None:
        if not rows:
            return
        reference = rows[self._reference_index(spec, rows)]
        reference_params = self.row_params(spec, reference.ratio)

        for kind in spec.channels:
            try:
                model = calibrate(CHANNEL_LAWS[kind], reference_params, reference.channels[kind].t2_seconds)
            except UnboundedReference as e:
                self.status.warning(f"No {kind.value} overlay: {e}")
                continue
            logger.info(f"Calibrated {kind.value} law at EJ/Ec = {reference.ratio:.4f} (prefactor {model.prefactor:.6g})")

            try:
                asymptotic = [(row.ratio, evaluate(model, self.row_params(spec, row.ratio))) for row in rows]
            except NonFiniteParameter as e:
                self.status.warning(f"No {kind.value} overlay: {e}")
                continue
            numeric = [(row.ratio, row.channels[kind].t2_seconds) for row in rows]
            errors = percent_error(numeric, asymptotic)

            for row, (_, model_t2), (_, error) in zip(rows, asymptotic, errors):
                row.channels[kind].t2_asymptotic = model_t2
                row.channels[kind].percent_error = error

    @staticmethod
    def fit_summary(rows: List[SweepRow]) -> Dict[str, float]:
        """
        Trend fits over finite T2 values:
        charge ln T2 against sqrt(EJ/Ec), flux and critical current log-log.
        """
        summary: Dict[str, float] = {}

        def series(kind: ChannelKind, low: float = 0.0, high: float = math.inf):
            points = [
                (row.ratio, row.channels[kind].t2_seconds)
                for row in rows
                if kind in row.channels
                and low <= row.ratio <= high
                and math.isfinite(row.channels[kind].t2_seconds)
            ]
            return points if len(points) >= 2 else []

        charge = series(ChannelKind.CHARGE)
        if charge:
            slope, _, r2 = fit_trend([math.sqrt(x) for x, _ in charge], [math.log(t) for _, t in charge])
            summary["charge_exponent"] = slope
            summary["charge_r2"] = r2

        flux = series(ChannelKind.FLUX)
        if flux:
            slope, _, r2 = fit_trend([math.log(x) for x, _ in flux], [math.log(t) for _, t in flux])
            summary["flux_loglog_slope"] = slope
            summary["flux_r2"] = r2

        ic = series(ChannelKind.CRITICAL_CURRENT, *IC_FIT_RANGE)
        if ic:
            slope, _, r2 = fit_trend([math.log(x) for x, _ in ic], [math.log(t) for _, t in ic])
            summary["ic_loglog_slope"] = slope
            summary["ic_r2"] = r2

        for key, value in summary.items():
            logger.info(f"Trend fit {key} = {value:.6g}")
        return summary


def run_sweep(spec: SweepSpec, max_workers: int = MAX_WORKERS) -> List[SweepRow]:
    return SweepService(max_workers=max_workers).run_sweep(spec)


# =====================
# WORKING-POINT REPORT
# =====================

def table2_conventions(
    params: CircuitParams,
    policies: Dict[ChannelKind, Policy],
    charge_unit: ChargeUnit,
    planck: Dict[ChannelKind, PlanckConvention],
) -> List[str]:
    return [
        f"EJ_sum = {params.ej_sum!r} GHz, Ec = {params.ec!r} GHz, d = {params.d!r} (EJ/Ec = {params.ratio:.6g})",
        f"bias ng = {params.ng!r}, phi_ext = {params.phi_ext!r} before any worst-case scan",
        "policies: " + ", ".join(f"{kind.value}={policies[kind].value}" for kind in ALL_CHANNELS),
        "T2 = 1 / (k A |dE01/dlambda|), E01 as E/h in GHz; k = 2 pi for hbar, 1 for h",
        "planck: " + ", ".join(f"{kind.value}={planck[kind].value}" for kind in ALL_CHANNELS),
        f"charge amplitude unit: {charge_unit.value} (ng shift = {CHARGE_UNIT_SCALE[charge_unit.value]!r} x A)",
        "critical-current lambda is the fractional change of EJ_sum at fixed d",
    ]


def reproduce_table2(
    params: Optional[CircuitParams] = None,
    trunc: Optional[TruncationConfig] = None,
    amplitudes: Optional[Dict[ChannelKind, float]] = None,
    policies: Optional[Dict[ChannelKind, Policy]] = None,
    methods: Optional[Dict[ChannelKind, SlopeMethod]] = None,
    charge_unit: Optional[ChargeUnit] = None,
    planck: Optional[Dict[ChannelKind, PlanckConvention]] = None,
    allow_amplitude_override: bool = False,
) -> Table2Report:
    """The three single-channel T2 values at the working point with their reference targets."""
    defaults = SweepSpec()
    params = params or CircuitParams(
        ej_sum=DEFAULT_EJ_SUM,
        ec=DEFAULT_EC,
        d=DEFAULT_ASYMMETRY,
        ng=DEFAULT_NG,
        phi_ext=DEFAULT_PHI_EXT,
    )
    trunc = trunc or TruncationConfig()
    amplitudes = {**defaults.amplitudes, **(amplitudes or {})}
    policies = {**defaults.policies, **(policies or {})}
    methods = {**defaults.methods, **(methods or {})}
    charge_unit = charge_unit or defaults.charge_unit
    planck = {**defaults.planck, **(planck or {})}

    results = {}
    targets = {}
    deviations = {}
    for kind in ALL_CHANNELS:
        result = t2_pure(
            params,
            trunc,
            NoiseChannel(kind, amplitudes[kind], charge_unit, planck[kind]),
            OperatingPoint(ng=params.ng, phi_ext=params.phi_ext, policy=policies[kind]),
            method=methods[kind],
            allow_amplitude_override=allow_amplitude_override,
        )
        target = TABLE2_TARGETS[kind.value]
        results[kind] = result
        targets[kind] = target
        deviations[kind] = 100.0 * (result.t2_seconds - target) / target
        logger.info(f"{kind.value}: T2 = {result.t2_seconds:.6g} s (target {target:.6g} s, {deviations[kind]:+.1f}%)")

    return Table2Report(
        results=results,
        targets=targets,
        deviations_pct=deviations,
        conventions=table2_conventions(params, policies, charge_unit, planck),
    )
