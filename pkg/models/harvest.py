from dataclasses import dataclass, field
import math
from typing import Any, Dict, List, Optional

from models.phase_space import DensityMatrix
from models.quadrature import EpsilonSchedule, QuadratureSpec, ResponseEstimate


@dataclass(frozen=True)
class HarvestParams:
    """Coupling, detector gaps and switching scale for one harvesting run.

    A zero gap is accepted so that scans can start at omega * sigma_t = 0;
    negative gaps are rejected.
    """
    coupling: float
    omega1: float
    omega2: float
    sigma_t: float = 1.0
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    eps: Optional[EpsilonSchedule] = None

    def __post_init__(self):
        if not self.coupling > 0:
            raise ValueError(f"coupling must be > 0, got {self.coupling}")
        if self.omega1 < 0 or self.omega2 < 0:
            raise ValueError(
                f"gaps must be non-negative, got ({self.omega1}, {self.omega2})"
            )
        if not self.sigma_t > 0:
            raise ValueError(f"sigma_t must be > 0, got {self.sigma_t}")
        if self.eps is None:
            object.__setattr__(self, "eps", EpsilonSchedule.dyadic(self.sigma_t))

    @classmethod
    def equal_gaps(cls, coupling: float, omega: float, sigma_t: float = 1.0,
                   quadrature: Optional[QuadratureSpec] = None,
                   eps: Optional[EpsilonSchedule] = None) -> "HarvestParams":
        return cls(
            coupling=coupling,
            omega1=omega,
            omega2=omega,
            sigma_t=sigma_t,
            quadrature=quadrature or QuadratureSpec(),
            eps=eps,
        )

    @property
    def equal(self) -> bool:
        return math.isclose(self.omega1, self.omega2, rel_tol=1e-12, abs_tol=0.0)

    @property
    def omega_sigma(self) -> float:
        return self.omega1 * self.sigma_t

    def to_dict(self):
        return {
            "coupling": self.coupling,
            "omega1": self.omega1,
            "omega2": self.omega2,
            "sigma_t": self.sigma_t,
            "omega_sigma": self.omega_sigma,
            "quadrature": self.quadrature.to_dict(),
            "eps": self.eps.to_dict(),
        }


@dataclass
class HarvestResult:
    params: HarvestParams
    method: str
    q: float
    beta: complex
    rho: DensityMatrix
    mana_general: float
    mana_family: float
    mana_closed: float
    f_q: Optional[ResponseEstimate] = None
    f_beta: Optional[ResponseEstimate] = None
    warnings: List[str] = field(default_factory=list)

    @property
    def quad_error_estimate(self) -> float:
        if self.f_q is None or self.f_beta is None:
            return float("nan")
        return max(
            self.f_q.error_estimate + self.f_q.quadrature_error,
            self.f_beta.error_estimate + self.f_beta.quadrature_error,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "params": self.params.to_dict(),
            "method": self.method,
            "q": self.q,
            "beta": [self.beta.real, self.beta.imag],
            "rho": self.rho.to_dict(),
            "mana_general": self.mana_general,
            "mana_family": self.mana_family,
            "mana_closed": self.mana_closed,
            "diagnostics": {
                "f_q": self.f_q.to_dict() if self.f_q else None,
                "f_beta": self.f_beta.to_dict() if self.f_beta else None,
                "quad_error_estimate": self.quad_error_estimate,
                "warnings": list(self.warnings),
            },
        }


@dataclass
class SweepRow:
    omega_sigma: float
    q_per_lambda2: float
    re_beta_per_lambda2: float
    im_beta_eps_plateau: float
    mana_closed_per_lambda2: float
    mana_family_per_lambda2: float
    mana_general_per_lambda2: float
    quad_error_estimate: float

    COLUMNS = (
        "omega_sigma",
        "q_per_lambda2",
        "re_beta_per_lambda2",
        "im_beta_eps_plateau",
        "mana_closed_per_lambda2",
        "mana_family_per_lambda2",
        "mana_general_per_lambda2",
        "quad_error_estimate",
    )

    @classmethod
    def from_result(cls, result: HarvestResult, omega_sigma: Optional[float] = None) -> "SweepRow":
        lam2 = result.params.coupling ** 2
        if omega_sigma is None:
            omega_sigma = result.params.omega_sigma
        plateau = result.f_beta.eps_imag_plateau if result.f_beta else float("nan")
        return cls(
            omega_sigma=omega_sigma,
            q_per_lambda2=result.q / lam2,
            re_beta_per_lambda2=result.beta.real / lam2,
            im_beta_eps_plateau=plateau,
            mana_closed_per_lambda2=result.mana_closed / lam2,
            mana_family_per_lambda2=result.mana_family / lam2,
            mana_general_per_lambda2=result.mana_general / lam2,
            quad_error_estimate=result.quad_error_estimate,
        )

    def values(self) -> List[float]:
        return [getattr(self, name) for name in self.COLUMNS]

    def to_dict(self):
        return dict(zip(self.COLUMNS, self.values()))


@dataclass
class OptimizationResult:
    x_star: float
    mana_star: float
    mana_star_per_lambda2: float
    x_residual: float
    evaluations: int

    def to_dict(self):
        return {
            "x_star": self.x_star,
            "mana_star": self.mana_star,
            "mana_star_per_lambda2": self.mana_star_per_lambda2,
            "x_residual": self.x_residual,
            "evaluations": self.evaluations,
        }
