"""
Data models for EJ/Ec sweeps and the working-point T2 report.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from app.config.settings import (
    DEFAULT_AMPLITUDES,
    DEFAULT_ASYMMETRY,
    DEFAULT_CHARGE_UNIT,
    DEFAULT_CONVERGENCE_TOL_GHZ,
    DEFAULT_EC,
    DEFAULT_METHODS,
    DEFAULT_NCUT,
    DEFAULT_NG,
    DEFAULT_PHI_EXT,
    DEFAULT_PLANCK,
    DEFAULT_POLICIES,
    DEFAULT_RATIO_MAX,
    DEFAULT_RATIO_MIN,
    DEFAULT_SPACING,
    DEFAULT_SWEEP_POINTS,
    REFERENCE_RATIO,
)
from app.models.errors import InvalidParameter
from app.models.noise import ChannelKind, ChargeUnit, PlanckConvention, Policy, SlopeMethod, T2Result

ALL_CHANNELS: Tuple[ChannelKind, ...] = (
    ChannelKind.CHARGE,
    ChannelKind.FLUX,
    ChannelKind.CRITICAL_CURRENT,
)


def _default_amplitudes() -> Dict[ChannelKind, float]:
    return {kind: DEFAULT_AMPLITUDES[kind.value] for kind in ALL_CHANNELS}


def _default_policies() -> Dict[ChannelKind, Policy]:
    return {kind: Policy(DEFAULT_POLICIES[kind.value]) for kind in ALL_CHANNELS}


def _default_methods() -> Dict[ChannelKind, SlopeMethod]:
    return {kind: SlopeMethod(DEFAULT_METHODS[kind.value]) for kind in ALL_CHANNELS}


def _default_planck() -> Dict[ChannelKind, PlanckConvention]:
    return {kind: PlanckConvention(DEFAULT_PLANCK[kind.value]) for kind in ALL_CHANNELS}


@dataclass(frozen=True)
class SweepSpec:
    """EJ_sum/Ec grid at fixed Ec plus the noise setup evaluated on each row."""
    ec: float = DEFAULT_EC
    ratio_min: float = DEFAULT_RATIO_MIN
    ratio_max: float = DEFAULT_RATIO_MAX
    points: int = DEFAULT_SWEEP_POINTS
    spacing: str = DEFAULT_SPACING
    d: float = DEFAULT_ASYMMETRY
    ng: float = DEFAULT_NG
    phi_ext: float = DEFAULT_PHI_EXT
    channels: Tuple[ChannelKind, ...] = ALL_CHANNELS
    amplitudes: Dict[ChannelKind, float] = field(default_factory=_default_amplitudes)
    policies: Dict[ChannelKind, Policy] = field(default_factory=_default_policies)
    methods: Dict[ChannelKind, SlopeMethod] = field(default_factory=_default_methods)
    charge_unit: ChargeUnit = ChargeUnit(DEFAULT_CHARGE_UNIT)
    planck: Dict[ChannelKind, PlanckConvention] = field(default_factory=_default_planck)
    ncut: int = DEFAULT_NCUT
    convergence_tol_ghz: float = DEFAULT_CONVERGENCE_TOL_GHZ
    reference_ratio: float = REFERENCE_RATIO
    allow_amplitude_override: bool = False

    def __post_init__(self):
        if not self.ratio_min > 0:
            raise InvalidParameter(f"ratio_min must satisfy ratio_min > 0, got {self.ratio_min!r}")
        if not self.ratio_max > self.ratio_min:
            raise InvalidParameter("ratio_max must satisfy ratio_max > ratio_min")
        if self.points < 2:
            raise InvalidParameter(f"points must satisfy points >= 2, got {self.points}")
        if self.spacing not in ("linear", "log"):
            raise InvalidParameter(f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if not self.channels:
            raise InvalidParameter("at least one channel is required")

    def cache_payload(self) -> Dict:
        """Plain-JSON view used for cache keys."""
        return {
            "ec": self.ec,
            "ratio_min": self.ratio_min,
            "ratio_max": self.ratio_max,
            "points": self.points,
            "spacing": self.spacing,
            "d": self.d,
            "ng": self.ng,
            "phi_ext": self.phi_ext,
            "channels": [kind.value for kind in self.channels],
            "amplitudes": {kind.value: self.amplitudes[kind] for kind in self.channels},
            "policies": {kind.value: self.policies[kind].value for kind in self.channels},
            "methods": {kind.value: self.methods[kind].value for kind in self.channels},
            "charge_unit": self.charge_unit.value,
            "planck": {kind.value: self.planck[kind].value for kind in self.channels},
            "ncut": self.ncut,
            "convergence_tol_ghz": self.convergence_tol_ghz,
            "reference_ratio": self.reference_ratio,
        }


@dataclass
class ChannelColumns:
    """Per-channel values on one sweep row. Asymptotic columns stay None until calibration."""
    slope: float
    t2_seconds: float
    t2_asymptotic: Optional[float] = None
    percent_error: Optional[float] = None


@dataclass
class SweepRow:
    ratio: float
    ej_sum: float
    e01: float
    anharmonicity: float
    channels: Dict[ChannelKind, ChannelColumns] = field(default_factory=dict)


@dataclass
class Table2Report:
    results: Dict[ChannelKind, T2Result]
    targets: Dict[ChannelKind, float]
    deviations_pct: Dict[ChannelKind, float]
    conventions: List[str]
