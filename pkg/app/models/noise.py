"""
Result types for spectra, noise sensitivities and scaling-law overlays.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

from app.config.settings import (
    AMPLITUDE_RANGES,
    CHARGE_UNIT_SCALE,
    DEFAULT_CHARGE_UNIT,
    DEFAULT_PLANCK,
    PLANCK_FACTORS,
)
from app.models.circuit import CircuitParams
from app.models.errors import InvalidParameter

UNBOUNDED = math.inf


class ChannelKind(str, Enum):
    """Noise variable lambda: offset charge, external flux, or critical current."""
    CHARGE = "charge"
    FLUX = "flux"
    CRITICAL_CURRENT = "ic"


class Policy(str, Enum):
    FIXED = "fixed"
    WORST_CASE = "worst_case"


class SlopeMethod(str, Enum):
    FINITE_DIFFERENCE = "finite_difference"
    HELLMANN_FEYNMAN = "hellmann_feynman"


class ChargeUnit(str, Enum):
    """Unit of the charge-noise amplitude."""
    COOPER_PAIR = "cooper_pair"
    ELECTRON = "electron"


class PlanckConvention(str, Enum):
    """Which constant turns the energy slope into a dephasing rate."""
    HBAR = "hbar"
    H = "h"


class AsymptoticKind(str, Enum):
    CHARGE_EXP = "charge_exp"
    FLUX_INV_SQRT = "flux_inv_sqrt"
    IC_INV_SQRT = "ic_inv_sqrt"


@dataclass(frozen=True)
class SpectrumResult:
    """Lowest eigen-energies (ascending, GHz) and the transitions derived from them."""
    energies: List[float]
    e01: float
    e12: float
    anharmonicity: float

    @classmethod
    def from_energies(cls, energies: List[float]) -> "SpectrumResult":
        e01 = energies[1] - energies[0]
        e12 = energies[2] - energies[1]
        return cls(energies=list(energies), e01=e01, e12=e12, anharmonicity=e12 - e01)


@dataclass(frozen=True)
class DispersionResult:
    """Peak-to-peak charge dispersion of E01 and its steepest point on [0, 0.5]."""
    epsilon01: float
    max_slope: float
    argmax_ng: float


@dataclass(frozen=True)
class NoiseChannel:
    """
    A 1/f source on one variable. ``amplitude`` is in the units of the 1/f tables
    (e, Phi0, fractional Ic); unset conventions resolve to the defaults in settings.
    """
    kind: ChannelKind
    amplitude: float
    charge_unit: Optional[ChargeUnit] = None
    planck: Optional[PlanckConvention] = None

    def __post_init__(self):
        if not math.isfinite(self.amplitude) or self.amplitude <= 0:
            raise InvalidParameter(f"amplitude must be positive and finite, got {self.amplitude!r}")
        if self.charge_unit is None:
            object.__setattr__(self, "charge_unit", ChargeUnit(DEFAULT_CHARGE_UNIT))
        if self.planck is None:
            object.__setattr__(self, "planck", PlanckConvention(DEFAULT_PLANCK[self.kind.value]))

    def in_table_range(self) -> bool:
        low, high = AMPLITUDE_RANGES[self.kind.value]
        return low <= self.amplitude <= high

    @property
    def lambda_amplitude(self) -> float:
        """Amplitude expressed in the channel's own variable (ng for charge)."""
        if self.kind is ChannelKind.CHARGE:
            return self.amplitude * CHARGE_UNIT_SCALE[self.charge_unit.value]
        return self.amplitude

    @property
    def planck_factor(self) -> float:
        return PLANCK_FACTORS[self.planck.value]


@dataclass(frozen=True)
class OperatingPoint:
    """Bias at which a slope is evaluated.

    A WORST_CASE point is unresolved until a scan fills in the channel's own variable;
    ``clamped`` marks a flux scan whose maximum sits at the scan cap.
    """
    ng: float
    phi_ext: float
    policy: Policy = Policy.FIXED
    resolved: bool = False
    clamped: bool = False

    @property
    def is_resolved(self) -> bool:
        return self.policy is Policy.FIXED or self.resolved


@dataclass(frozen=True)
class T2Result:
    channel: NoiseChannel
    slope: float
    t2_seconds: float
    point: OperatingPoint
    method: SlopeMethod

    @property
    def is_unbounded(self) -> bool:
        return math.isinf(self.t2_seconds)


@dataclass(frozen=True)
class RateBudget:
    """Relaxation and pure-dephasing times; math.inf means the rate is zero."""
    t1_seconds: float = UNBOUNDED
    t_phi_seconds: float = UNBOUNDED

    def __post_init__(self):
        for name in ("t1_seconds", "t_phi_seconds"):
            value = getattr(self, name)
            if math.isnan(value) or value <= 0:
                raise InvalidParameter(f"{name} must be positive or Unbounded, got {value!r}")


@dataclass(frozen=True)
class AsymptoticModel:
    kind: AsymptoticKind
    prefactor: float
    reference_params: CircuitParams
    reference_t2: float
    reference_shape: float
    reference_result: Optional[T2Result] = None
