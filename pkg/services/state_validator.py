"""Density-matrix invariant checks."""
from typing import List, Optional, Tuple

import numpy as np

from models.phase_space import DensityMatrix

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
DEFAULT_PSD_TOLERANCE = 1e-10


class StateValidationError(ValueError):
    """Raised when a density matrix violates one or more invariants."""
    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or []

    @property
    def invariants(self) -> List[str]:
        return [error.split(":", 1)[0] for error in self.errors]


class StateValidator:
    """Check the invariants a qudit state must satisfy.

    Each failed check appends "<invariant>: <detail>" to ``errors`` so that
    callers can report the violated invariant by name.
    """

    def __init__(self, psd_tolerance: Optional[float] = DEFAULT_PSD_TOLERANCE,
                 check_trace: bool = True):
        self.psd_tolerance = psd_tolerance
        self.check_trace = check_trace
        self.errors: List[str] = []

    def validate_all(self, rho: DensityMatrix) -> Tuple[bool, List[str]]:
        self.errors = []

        self._validate_dimension(rho)
        if self.errors:
            return False, self.errors
        self._validate_finite(rho)
        if self.errors:
            return False, self.errors
        self._validate_hermiticity(rho)
        if self.check_trace:
            self._validate_trace(rho)
        if self.psd_tolerance is not None and not self.errors:
            self._validate_positivity(rho)

        if self.errors:
            return False, self.errors
        return True, []

    def validate_or_raise(self, rho: DensityMatrix) -> DensityMatrix:
        is_valid, errors = self.validate_all(rho)
        if not is_valid:
            message = "Invalid density matrix:\n" + "\n".join(f"  - {e}" for e in errors)
            raise StateValidationError(message, errors)
        return rho

    def min_eigenvalue(self, rho: DensityMatrix) -> float:
        hermitian = 0.5 * (rho.entries + rho.entries.conj().T)
        return float(np.linalg.eigvalsh(hermitian)[0])

    def _validate_dimension(self, rho: DensityMatrix):
        n = rho.dim
        if n < 3 or n % 2 == 0:
            self.errors.append(f"dimension: expected odd n >= 3, got {n}")

    def _validate_finite(self, rho: DensityMatrix):
        if not np.all(np.isfinite(rho.entries)):
            self.errors.append("finite: entries contain NaN or infinity")

    def _validate_hermiticity(self, rho: DensityMatrix):
        deviation = float(np.max(np.abs(rho.entries - rho.entries.conj().T)))
        if deviation > HERMITICITY_TOL:
            self.errors.append(
                f"hermiticity: max |rho - rho^dagger| = {deviation:.3e} exceeds {HERMITICITY_TOL:g}"
            )

    def _validate_trace(self, rho: DensityMatrix):
        trace = complex(np.trace(rho.entries))
        if abs(trace - 1.0) > TRACE_TOL:
            self.errors.append(
                f"unit_trace: trace = {trace.real:.15g}{trace.imag:+.3e}j"
            )

    def _validate_positivity(self, rho: DensityMatrix):
        smallest = self.min_eigenvalue(rho)
        if smallest < -self.psd_tolerance:
            self.errors.append(
                f"positivity: smallest eigenvalue {smallest:.3e} below -{self.psd_tolerance:g}"
            )
