"""Switching functions chi(tau) controlling the detector-field coupling."""
from abc import ABC, abstractmethod
from typing import Dict, Type

import numpy as np


class SwitchingFunction(ABC):
    """Abstract time profile of the interaction.

    Implementations must accept scalar or array proper times and return
    values of the same shape. ``time_scale`` sets the unit in which the
    quadrature truncates and panels the time domain.
    """

    @property
    @abstractmethod
    def name(self) -> str:
        """Identifier used by the factory (e.g. 'gaussian')."""

    @property
    @abstractmethod
    def time_scale(self) -> float:
        """Characteristic duration of the switching."""

    @abstractmethod
    def __call__(self, tau):
        """Evaluate chi at proper time(s) tau."""

    def to_dict(self):
        return {"name": self.name, "time_scale": self.time_scale}


class GaussianSwitching(SwitchingFunction):
    """Unnormalised Gaussian chi(tau) = exp(-tau^2 / sigma_t^2)."""

    def __init__(self, sigma_t: float = 1.0):
        if not sigma_t > 0:
            raise ValueError(f"sigma_t must be > 0, got {sigma_t}")
        self.sigma_t = float(sigma_t)

    @property
    def name(self) -> str:
        return "gaussian"

    @property
    def time_scale(self) -> float:
        return self.sigma_t

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        return np.exp(-(tau / self.sigma_t) ** 2)

    def __repr__(self):
        return f"GaussianSwitching(sigma_t={self.sigma_t!r})"


def switching_eval(sw: SwitchingFunction, tau) -> float:
    return float(sw(tau))


class SwitchingFactory:
    """Build switching functions by name."""

    REGISTRY: Dict[str, Type[SwitchingFunction]] = {
        "gaussian": GaussianSwitching,
    }

    def create(self, name: str, **kwargs) -> SwitchingFunction:
        key = name.strip().lower()
        if key not in self.REGISTRY:
            raise ValueError(
                f"Unknown switching function '{name}'. "
                f"Valid options: {', '.join(sorted(self.REGISTRY))}"
            )
        return self.REGISTRY[key](**kwargs)


def create_switching(name: str = "gaussian", **kwargs) -> SwitchingFunction:
    return SwitchingFactory().create(name, **kwargs)
