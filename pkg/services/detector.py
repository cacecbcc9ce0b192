"""Three-level detector: Hamiltonian, monopole, family states and their mana."""
import math
from typing import FrozenSet, Optional, Sequence

import numpy as np

from models.detector_state import DetectorFamilyState
from models.phase_space import DensityMatrix
from services.state_validator import DEFAULT_PSD_TOLERANCE, StateValidator

LEVELS = 3
SUPPORT_THRESHOLD = 1e-12
FAMILY_SLACK = 1e-12
_SQRT3 = math.sqrt(3.0)


class FamilyStateError(ValueError):
    """Raised when (p, q, beta) cannot describe a detector family state."""
    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or []


def _check_gaps(omega1: float, omega2: float):
    if not (omega1 > 0 and omega2 > 0):
        raise ValueError(f"detector gaps must be positive, got ({omega1}, {omega2})")


def free_hamiltonian(omega1: float, omega2: float) -> np.ndarray:
    _check_gaps(omega1, omega2)
    return np.diag([0.0, omega1, omega1 + omega2]).astype(complex)


def monopole(tau: float, omega1: float, omega2: float) -> np.ndarray:
    """Interaction-picture monopole moment at proper time tau."""
    _check_gaps(omega1, omega2)
    mu = np.zeros((LEVELS, LEVELS), dtype=complex)
    mu[1, 0] = np.exp(1j * omega1 * tau) / math.sqrt(2.0)
    mu[2, 1] = np.exp(1j * omega2 * tau) / math.sqrt(2.0)
    return mu + mu.conj().T


def parity_support(m: int, taus: Sequence[float], omega1: float, omega2: float) -> FrozenSet[int]:
    """Levels reached by mu(tau_1) ... mu(tau_m) acting on |0>.

    Odd products land in {1}, even ones in {0, 2}.
    """
    if len(taus) != m:
        raise ValueError(f"expected {m} proper times, got {len(taus)}")
    state = np.zeros(LEVELS, dtype=complex)
    state[0] = 1.0
    for tau in reversed(list(taus)):
        state = monopole(tau, omega1, omega2) @ state
    return frozenset(int(k) for k in np.flatnonzero(np.abs(state) > SUPPORT_THRESHOLD))


def _check_family(fam: DetectorFamilyState):
    errors = []
    if fam.p < -FAMILY_SLACK:
        errors.append(f"p must be non-negative, got {fam.p}")
    if fam.q < -FAMILY_SLACK:
        errors.append(f"q must be non-negative, got {fam.q}")
    if fam.p + fam.q > 1.0 + FAMILY_SLACK:
        errors.append(f"p + q must not exceed 1, got {fam.p + fam.q}")
    if not np.isfinite(complex(fam.beta)):
        errors.append("beta must be finite")
    if errors:
        raise FamilyStateError("Invalid detector family state: " + "; ".join(errors), errors)


def family_matrix(fam: DetectorFamilyState) -> np.ndarray:
    beta = complex(fam.beta)
    return np.array(
        [
            [fam.p, 0.0, beta.conjugate()],
            [0.0, fam.q, 0.0],
            [beta, 0.0, fam.r],
        ],
        dtype=complex,
    )


def assemble_state(fam: DetectorFamilyState,
                   psd_tolerance: Optional[float] = DEFAULT_PSD_TOLERANCE) -> DensityMatrix:
    """[[p, 0, beta*], [0, q, 0], [beta, 0, 1 - p - q]] after validation.

    Args:
        fam: Populations p, q and the (2, 0) coherence beta
        psd_tolerance: Most negative eigenvalue accepted; None skips the
            positivity check

    Returns:
        The validated 3-level DensityMatrix

    Raises:
        FamilyStateError: p or q negative, or p + q > 1
        StateValidationError: The matrix fails a density-matrix invariant
    """
    _check_family(fam)
    rho = DensityMatrix(dim=LEVELS, entries=family_matrix(fam))
    return StateValidator(psd_tolerance=psd_tolerance).validate_or_raise(rho)


def extract_family(rho: DensityMatrix) -> DetectorFamilyState:
    """Read (p, q, beta) back from a matrix with the family zero pattern."""
    if rho.dim != LEVELS:
        raise FamilyStateError(f"expected a {LEVELS}-level state, got dim {rho.dim}")
    entries = rho.entries
    off_pattern = [entries[0, 1], entries[1, 0], entries[1, 2], entries[2, 1]]
    if any(abs(z) > SUPPORT_THRESHOLD for z in off_pattern):
        raise FamilyStateError("coherences with |1> are not zero", ["zero_pattern"])
    return DetectorFamilyState(
        p=float(entries[0, 0].real),
        q=float(entries[1, 1].real),
        beta=complex(entries[2, 0]),
    )


def family_mana(q: float, beta: complex) -> float:
    """Closed-form mana of a family state; independent of p."""
    beta = complex(beta)
    re, im = beta.real, beta.imag
    shifted, twist = q - re, _SQRT3 * im
    # the pair is summed first so that beta -> conj(beta) is exact
    bracket = abs(q + 2.0 * re) + (abs(shifted - twist) + abs(shifted + twist))
    return math.log1p(-q + bracket / 3.0)
