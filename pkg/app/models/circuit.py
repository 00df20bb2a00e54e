"""
Circuit parameter space and the charge-basis matrix representation.
"""
import math
from dataclasses import dataclass, field, fields

import numpy as np

from app.config.settings import DEFAULT_CONVERGENCE_TOL_GHZ, DEFAULT_NCUT, MIN_NCUT
from app.models.errors import InvalidParameter, NonFiniteParameter

HERMITICITY_RTOL = 1e-12


@dataclass(frozen=True)
class CircuitParams:
    """Knobs of the SQUID-transmon Hamiltonian. Energies are E/h in GHz."""
    ej_sum: float
    ec: float
    d: float = 0.0
    ng: float = 0.0
    phi_ext: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise NonFiniteParameter(f"{f.name} must be finite, got {value!r}")
        if self.ej_sum < 0:
            raise InvalidParameter(f"ej_sum must satisfy ej_sum >= 0, got {self.ej_sum!r}")
        if self.ec <= 0:
            raise InvalidParameter(f"ec must satisfy ec > 0, got {self.ec!r}")
        if not 0 <= self.d < 1:
            raise InvalidParameter(f"d must satisfy 0 <= d < 1, got {self.d!r}")

    @property
    def ratio(self) -> float:
        """EJ_sum / Ec."""
        return self.ej_sum / self.ec


@dataclass(frozen=True)
class TruncationConfig:
    """Charge basis n in {-ncut, ..., ncut}."""
    ncut: int = DEFAULT_NCUT
    convergence_tol_ghz: float = DEFAULT_CONVERGENCE_TOL_GHZ

    def __post_init__(self):
        if isinstance(self.ncut, bool) or not isinstance(self.ncut, (int, np.integer)):
            raise InvalidParameter(f"ncut must be an integer, got {self.ncut!r}")
        if self.ncut < MIN_NCUT:
            raise InvalidParameter(f"ncut must satisfy ncut >= {MIN_NCUT}, got {self.ncut}")
        if not math.isfinite(self.convergence_tol_ghz):
            raise NonFiniteParameter("convergence_tol_ghz must be finite")
        if self.convergence_tol_ghz < 0:
            raise InvalidParameter(
                f"convergence_tol_ghz must satisfy convergence_tol_ghz >= 0, got {self.convergence_tol_ghz!r}"
            )

    @property
    def dimension(self) -> int:
        return 2 * self.ncut + 1


@dataclass(frozen=True)
class HermitianMatrix:
    """Dense complex matrix, checked for Hermiticity on construction."""
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.complex128)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] == 0:
            raise InvalidParameter(f"expected a non-empty square matrix, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise NonFiniteParameter("matrix entries must be finite")
        scale = max(float(np.max(np.abs(entries))), 1.0)
        if np.max(np.abs(entries - entries.conj().T)) > HERMITICITY_RTOL * scale:
            raise InvalidParameter("matrix is not Hermitian")
        object.__setattr__(self, "entries", entries)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]
