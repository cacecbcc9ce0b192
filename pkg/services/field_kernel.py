"""Regularised vacuum Wightman function of a massless scalar in 3+1 dimensions.

Along an inertial worldline the spatial position drops out and the
two-point function depends only on tau1 - tau2:

    W(tau1, tau2) = 1 / [4 pi^2 (eps + i (tau1 - tau2))^2]

The 1/(4 pi^2) is the d = 3 value of the general coefficient
Gamma(d-1) / [(4 pi)^(d/2) Gamma(d/2)] returned by ``wightman_prefactor``.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.special import gamma

SPATIAL_DIMENSION = 3
WIGHTMAN_PREFACTOR_D3 = 1.0 / (4.0 * math.pi ** 2)


@dataclass(frozen=True)
class WightmanKernel:
    """Inertial Wightman function with i-epsilon regulator ``epsilon``."""
    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")

    def __call__(self, tau1, tau2):
        return wightman_inertial(self, tau1, tau2)


def wightman_prefactor(d: float = SPATIAL_DIMENSION) -> float:
    return float(gamma(d - 1.0) / ((4.0 * math.pi) ** (d / 2.0) * gamma(d / 2.0)))


def regulated_mode_integral(d: float, eps: float, delta):
    """Closed form of int_0^inf k^(d-2) exp(-k (eps + i delta)) dk."""
    z = eps + 1j * np.asarray(delta, dtype=float)
    return gamma(d - 1.0) / z ** (d - 1.0)


def wightman_inertial(kernel: WightmanKernel, tau1, tau2):
    delta = np.asarray(tau1, dtype=float) - np.asarray(tau2, dtype=float)
    z = kernel.epsilon + 1j * delta
    return WIGHTMAN_PREFACTOR_D3 / (z * z)
