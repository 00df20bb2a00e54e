"""
Run configuration: JSON config files resolved against built-in defaults.
"""
import json
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.config.settings import (
    AMPLITUDE_RANGES,
    DEFAULT_AMPLITUDES,
    DEFAULT_ASYMMETRY,
    DEFAULT_CHARGE_UNIT,
    DEFAULT_CONVERGENCE_TOL_GHZ,
    DEFAULT_EC,
    DEFAULT_EJ_SUM,
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
    MAX_WORKERS,
    MIN_NCUT,
    REFERENCE_RATIO,
)
from app.models.circuit import CircuitParams, TruncationConfig
from app.models.errors import ConfigParseError, ConfigValidationError
from app.models.noise import (
    ChannelKind,
    ChargeUnit,
    NoiseChannel,
    OperatingPoint,
    PlanckConvention,
    Policy,
    SlopeMethod,
)
from app.models.sweep import ALL_CHANNELS, SweepSpec

# Human-readable bounds, reported verbatim when a field fails validation
FIELD_BOUNDS = {
    "ej_sum": "ej_sum >= 0",
    "ec": "ec > 0",
    "d": "0 <= d < 1",
    "ncut": f"ncut >= {MIN_NCUT}",
    "convergence_tol_ghz": "convergence_tol_ghz >= 0",
    "amplitude_charge": "amplitude_charge > 0",
    "amplitude_flux": "amplitude_flux > 0",
    "amplitude_ic": "amplitude_ic > 0",
    "t1_seconds": "t1_seconds > 0",
    "ratio_min": "ratio_min > 0",
    "ratio_max": "ratio_max > 0",
    "points": "points >= 2",
    "reference_ratio": "reference_ratio > 0",
    "max_workers": "max_workers >= 1",
}


class RunConfig(BaseModel):
    """Every knob of a run. All fields are optional in the JSON and fall back to the defaults in settings."""
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False, frozen=True)

    # Circuit
    ej_sum: float = Field(DEFAULT_EJ_SUM, ge=0)
    ec: float = Field(DEFAULT_EC, gt=0)
    d: float = Field(DEFAULT_ASYMMETRY, ge=0, lt=1)
    ng: float = DEFAULT_NG
    phi_ext: float = DEFAULT_PHI_EXT

    # Truncation
    ncut: int = Field(DEFAULT_NCUT, ge=MIN_NCUT)
    convergence_tol_ghz: float = Field(DEFAULT_CONVERGENCE_TOL_GHZ, ge=0)

    # Noise channels
    channels: List[ChannelKind] = Field(default_factory=lambda: list(ALL_CHANNELS), min_length=1)
    amplitude_charge: float = Field(DEFAULT_AMPLITUDES["charge"], gt=0)
    amplitude_flux: float = Field(DEFAULT_AMPLITUDES["flux"], gt=0)
    amplitude_ic: float = Field(DEFAULT_AMPLITUDES["ic"], gt=0)
    policy_charge: Policy = Policy(DEFAULT_POLICIES["charge"])
    policy_flux: Policy = Policy(DEFAULT_POLICIES["flux"])
    policy_ic: Policy = Policy(DEFAULT_POLICIES["ic"])
    method_charge: SlopeMethod = SlopeMethod(DEFAULT_METHODS["charge"])
    method_flux: SlopeMethod = SlopeMethod(DEFAULT_METHODS["flux"])
    method_ic: SlopeMethod = SlopeMethod(DEFAULT_METHODS["ic"])
    charge_unit: ChargeUnit = ChargeUnit(DEFAULT_CHARGE_UNIT)
    planck_charge: PlanckConvention = PlanckConvention(DEFAULT_PLANCK["charge"])
    planck_flux: PlanckConvention = PlanckConvention(DEFAULT_PLANCK["flux"])
    planck_ic: PlanckConvention = PlanckConvention(DEFAULT_PLANCK["ic"])
    allow_amplitude_override: bool = False
    t1_seconds: Optional[float] = Field(None, gt=0)

    # Sweep
    ratio_min: float = Field(DEFAULT_RATIO_MIN, gt=0)
    ratio_max: float = Field(DEFAULT_RATIO_MAX, gt=0)
    points: int = Field(DEFAULT_SWEEP_POINTS, ge=2)
    spacing: Literal["linear", "log"] = DEFAULT_SPACING
    reference_ratio: float = Field(REFERENCE_RATIO, gt=0)
    max_workers: int = Field(MAX_WORKERS, ge=1)

    # Output
    format: Literal["csv", "json"] = "csv"
    out: Optional[str] = None
    svg: Optional[str] = None
    svg_channel: ChannelKind = ChannelKind.CHARGE
    cache_dir: Optional[str] = None

    @model_validator(mode="after")
    def check_cross_field_bounds(self) -> "RunConfig":
        problems = []
        if not self.ratio_max > self.ratio_min:
            problems.append("ratio_max must satisfy ratio_max > ratio_min")
        if not self.allow_amplitude_override:
            for kind, amplitude in self.amplitudes().items():
                low, high = AMPLITUDE_RANGES[kind.value]
                if not low <= amplitude <= high:
                    problems.append(
                        f"amplitude_{kind.value} must satisfy {low:g} <= amplitude_{kind.value} <= {high:g} "
                        "(set allow_amplitude_override to use it anyway)"
                    )
        if problems:
            raise ValueError("; ".join(problems))
        return self

    @property
    def ratio(self) -> float:
        return self.ej_sum / self.ec

    def circuit_params(self) -> CircuitParams:
        return CircuitParams(ej_sum=self.ej_sum, ec=self.ec, d=self.d, ng=self.ng, phi_ext=self.phi_ext)

    def truncation(self) -> TruncationConfig:
        return TruncationConfig(ncut=self.ncut, convergence_tol_ghz=self.convergence_tol_ghz)

    def amplitudes(self) -> Dict[ChannelKind, float]:
        return {kind: getattr(self, f"amplitude_{kind.value}") for kind in ALL_CHANNELS}

    def policies(self) -> Dict[ChannelKind, Policy]:
        return {kind: getattr(self, f"policy_{kind.value}") for kind in ALL_CHANNELS}

    def methods(self) -> Dict[ChannelKind, SlopeMethod]:
        return {kind: getattr(self, f"method_{kind.value}") for kind in ALL_CHANNELS}

    def planck(self) -> Dict[ChannelKind, PlanckConvention]:
        return {kind: getattr(self, f"planck_{kind.value}") for kind in ALL_CHANNELS}

    def noise_channel(self, kind: ChannelKind) -> NoiseChannel:
        return NoiseChannel(kind, self.amplitudes()[kind], self.charge_unit, self.planck()[kind])

    def operating_point(self, kind: ChannelKind) -> OperatingPoint:
        return OperatingPoint(ng=self.ng, phi_ext=self.phi_ext, policy=self.policies()[kind])

    def sweep_spec(self) -> SweepSpec:
        # keep the requested channels in their canonical order
        channels = tuple(kind for kind in ALL_CHANNELS if kind in self.channels)
        return SweepSpec(
            ec=self.ec,
            ratio_min=self.ratio_min,
            ratio_max=self.ratio_max,
            points=self.points,
            spacing=self.spacing,
            d=self.d,
            ng=self.ng,
            phi_ext=self.phi_ext,
            channels=channels,
            amplitudes=self.amplitudes(),
            policies=self.policies(),
            methods=self.methods(),
            charge_unit=self.charge_unit,
            planck=self.planck(),
            ncut=self.ncut,
            convergence_tol_ghz=self.convergence_tol_ghz,
            reference_ratio=self.reference_ratio,
            allow_amplitude_override=self.allow_amplitude_override,
        )


def _describe(error: Dict[str, Any]) -> str:
    location = ".".join(str(part) for part in error["loc"])
    if error["type"] == "extra_forbidden":
        return f"unknown key '{location}'"
    field = str(error["loc"][0]) if error["loc"] else ""
    if field in FIELD_BOUNDS and error["type"] not in ("float_parsing", "int_parsing", "int_type", "float_type"):
        return f"{field} must satisfy {FIELD_BOUNDS[field]}"
    message = error["msg"].removeprefix("Value error, ")
    return f"{location}: {message}" if location else message


def build_config(data: Dict[str, Any]) -> RunConfig:
    """Validate a plain dict into a RunConfig, collecting every problem."""
    if not isinstance(data, dict):
        raise ConfigValidationError(["config must be a JSON object"])
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        problems = []
        for error in e.errors():
            problem = _describe(error)
            if problem not in problems:
                problems.append(problem)
        raise ConfigValidationError(problems) from e


def parse_config(text: str) -> RunConfig:
    """Parse JSON config text; missing keys take their defaults."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(e.msg, e.lineno, e.colno) from e
    return build_config(data)


def load_config(path: str) -> RunConfig:
    with open(path, 'r', encoding='utf-8') as f:
        return parse_config(f.read())


def serialize_config(config: RunConfig) -> str:
    return json.dumps(config.model_dump(mode="json"), indent=2) + "\n"


def overlay_config(config: RunConfig, overrides: Dict[str, Any]) -> RunConfig:
    """Apply explicit overrides (CLI flags) on top of a resolved config."""
    if not overrides:
        return config
    return build_config({**config.model_dump(mode="json"), **overrides})
