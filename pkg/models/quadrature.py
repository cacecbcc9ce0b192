from dataclasses import dataclass, field
from typing import List, Optional, Tuple


@dataclass(frozen=True)
class QuadratureSpec:
    """Panel scheme and tolerance for the double-integral engine.

    truncation_radius and panel_width are in units of the switching time
    scale; the engine multiplies them by sigma_t.
    """
    truncation_radius: float = 6.0
    target_abs_tol: float = 1e-10
    order: int = 20
    check_order: int = 14
    panel_width: float = 0.5
    max_refinements: int = 3
    workers: int = 1

    def __post_init__(self):
        if self.truncation_radius < 4:
            raise ValueError(f"truncation_radius must be >= 4, got {self.truncation_radius}")
        if not self.target_abs_tol > 0:
            raise ValueError(f"target_abs_tol must be > 0, got {self.target_abs_tol}")
        if not 2 <= self.check_order < self.order:
            raise ValueError(
                f"check_order must satisfy 2 <= check_order < order, got "
                f"{self.check_order} and {self.order}"
            )
        if not self.panel_width > 0:
            raise ValueError(f"panel_width must be > 0, got {self.panel_width}")
        if self.max_refinements < 0:
            raise ValueError("max_refinements must be non-negative")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    @classmethod
    def from_settings(cls, settings, **overrides) -> "QuadratureSpec":
        values = {
            "truncation_radius": settings.truncation_radius,
            "target_abs_tol": settings.quad_abs_tol,
            "order": settings.quad_order,
            "check_order": settings.quad_check_order,
            "panel_width": settings.quad_panel_width,
            "max_refinements": settings.quad_max_refinements,
            "workers": settings.quad_workers,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def to_dict(self):
        return {
            "truncation_radius": self.truncation_radius,
            "target_abs_tol": self.target_abs_tol,
            "order": self.order,
            "check_order": self.check_order,
            "panel_width": self.panel_width,
            "max_refinements": self.max_refinements,
        }


@dataclass(frozen=True)
class EpsilonSchedule:
    """Strictly decreasing regulator values used for the eps -> 0 limit."""
    eps_values: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(e) for e in self.eps_values)
        object.__setattr__(self, "eps_values", values)
        if not values:
            raise ValueError("eps schedule is empty")
        if any(e <= 0 for e in values):
            raise ValueError("eps values must be positive")
        if any(b >= a for a, b in zip(values, values[1:])):
            raise ValueError("eps values must be strictly decreasing")

    @classmethod
    def dyadic(cls, sigma_t: float = 1.0, k_min: int = 4, k_max: int = 10) -> "EpsilonSchedule":
        return cls(tuple(sigma_t * 2.0 ** -k for k in range(k_min, k_max + 1)))

    def __len__(self):
        return len(self.eps_values)

    def __iter__(self):
        return iter(self.eps_values)

    def to_dict(self):
        return {"eps_values": list(self.eps_values)}


@dataclass
class QuadratureResult:
    value: complex
    error_estimate: float
    evaluations: int
    refinement_level: int = 0
    # |Im| discarded by the Hermitian pairing mode
    asymmetry: float = 0.0
    attempts: int = 1

    def to_dict(self):
        return {
            "value": [self.value.real, self.value.imag],
            "error_estimate": self.error_estimate,
            "evaluations": self.evaluations,
            "refinement_level": self.refinement_level,
            "asymmetry": self.asymmetry,
            "attempts": self.attempts,
        }


@dataclass
class ExtrapolationResult:
    limit: complex
    error_estimate: float
    converged: bool
    table: List[List[complex]] = field(default_factory=list)
    samples: List[Tuple[float, complex]] = field(default_factory=list)

    def to_dict(self):
        return {
            "limit": [complex(self.limit).real, complex(self.limit).imag],
            "error_estimate": self.error_estimate,
            "converged": self.converged,
            "samples": [
                [eps, [complex(v).real, complex(v).imag]] for eps, v in self.samples
            ],
        }


@dataclass
class ResponseEstimate:
    """Per-lambda^2 detector response obtained over an eps schedule."""
    value: float
    error_estimate: float
    converged: bool
    extrapolated: bool
    samples: List[Tuple[float, complex]] = field(default_factory=list)
    quadrature_error: float = 0.0
    eps_imag: Optional[List[float]] = None
    plateau_spread: Optional[float] = None
    # extra refinement levels summed over the eps schedule
    refinements: int = 0

    @property
    def eps_imag_plateau(self) -> float:
        if not self.eps_imag:
            return float("nan")
        return self.eps_imag[-1]

    def to_dict(self):
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "converged": self.converged,
            "extrapolated": self.extrapolated,
            "quadrature_error": self.quadrature_error,
            "samples": [[eps, [v.real, v.imag]] for eps, v in self.samples],
            "eps_imag": self.eps_imag,
            "plateau_spread": self.plateau_spread,
            "refinements": self.refinements,
        }
