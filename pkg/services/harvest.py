"""Mana harvested by a three-level detector from the scalar vacuum.

Two routes give the second-order detector state:

* closed forms in x = omega * sigma_t for Gaussian switching and equal gaps;
* the regulated double integrals, evaluated by quadrature at each eps of
  the schedule and extrapolated to eps -> 0.

Per-lambda^2 quantities depend on (omega, sigma_t) only through x.
"""
from concurrent.futures import ThreadPoolExecutor
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import erfc, erfcx

from config import settings
from models.detector_state import DetectorFamilyState
from models.harvest import HarvestParams, HarvestResult, OptimizationResult, SweepRow
from models.quadrature import EpsilonSchedule, QuadratureSpec, ResponseEstimate
from services import field_kernel
from services.detector import assemble_state, family_mana, family_matrix
from services.phase_space import mana
from services.quadrature import NOISE_FACTOR, extrapolate_eps, integrate_near_diagonal
from services.switching import GaussianSwitching, SwitchingFunction

logger = logging.getLogger(__name__)

METHODS = ("closed", "quadrature")

# |<1|mu|0>|^2 and <2|mu|1><1|mu|0> with the time-dependent phases removed
MU_10_SQUARED = 0.5
MU_21_MU_10 = 0.5

PLATEAU_LEVELS = 3
X_RESIDUAL_TOL = 1e-6
_SQRT_HALF_PI = math.sqrt(math.pi / 2.0)
_SQRT_TWO_OVER_PI = math.sqrt(2.0 / math.pi)


class GapMismatchError(ValueError):
    """The closed-form route needs omega1 == omega2."""


class OptimizationError(RuntimeError):
    """The maximiser did not find an interior optimum."""


def q_per_lambda2(x: float) -> float:
    """(1/8 pi) [exp(-x^2/2) - x sqrt(pi/2) erfc(x/sqrt 2)]."""
    x = float(x)
    return math.exp(-0.5 * x * x) * (1.0 - x * _SQRT_HALF_PI * float(erfcx(x / math.sqrt(2.0)))) / (8.0 * math.pi)


def beta_per_lambda2(x: float) -> float:
    return -math.exp(-0.5 * float(x) ** 2) / (16.0 * math.pi)


def mana_per_lambda2(x: float) -> float:
    x = float(x)
    return x * float(erfc(x / math.sqrt(2.0))) / (12.0 * math.sqrt(2.0 * math.pi))


def mana_stationarity(x: float) -> float:
    """Zero exactly where mana_per_lambda2 is stationary."""
    x = float(x)
    return float(erfc(x / math.sqrt(2.0))) - x * _SQRT_TWO_OVER_PI * math.exp(-0.5 * x * x)


def _stationarity_slope(x: float) -> float:
    return _SQRT_TWO_OVER_PI * math.exp(-0.5 * x * x) * (x * x - 2.0)


def _require_equal_gaps(params: HarvestParams):
    if not params.equal:
        raise GapMismatchError(
            f"closed form requires equal gaps, got omega1={params.omega1}, omega2={params.omega2}"
        )


def q_closed(params: HarvestParams) -> float:
    return params.coupling ** 2 * q_per_lambda2(params.omega_sigma)


def beta_closed(params: HarvestParams) -> float:
    _require_equal_gaps(params)
    return params.coupling ** 2 * beta_per_lambda2(params.omega_sigma)


def mana_closed(params: HarvestParams) -> float:
    _require_equal_gaps(params)
    return params.coupling ** 2 * mana_per_lambda2(params.omega_sigma)


def _switching_for(params: HarvestParams, switching: Optional[SwitchingFunction]) -> SwitchingFunction:
    return switching if switching is not None else GaussianSwitching(params.sigma_t)


def _integrate_levels(params: HarvestParams, switching: SwitchingFunction, make_integrand,
                      mode: str) -> Tuple[List[Tuple[float, complex]], float, int]:
    spec = params.quadrature
    scale = switching.time_scale
    samples = []
    worst = 0.0
    refinements = 0
    for eps in params.eps:
        kernel = field_kernel.WightmanKernel(eps)
        result = integrate_near_diagonal(
            make_integrand(kernel),
            radius=spec.truncation_radius * scale,
            scale=eps,
            spec=spec,
            mode=mode,
            width=spec.panel_width * scale,
        )
        samples.append((eps, result.value))
        worst = max(worst, result.error_estimate)
        refinements += result.attempts - 1
        logger.debug("eps=%.3e value=%s estimate=%.2e", eps, result.value, result.error_estimate)
    return samples, worst, refinements


def f_q_quadrature(params: HarvestParams, switching: Optional[SwitchingFunction] = None,
                   degree: Optional[int] = None) -> ResponseEstimate:
    """Excitation probability per lambda^2 from the regulated double integral.

    Args:
        params: Gaps, switching scale, quadrature settings and eps schedule
        switching: Switching profile (default Gaussian with params.sigma_t)
        degree: Richardson degree (default settings.extrapolation_degree)

    Returns:
        ResponseEstimate with the eps -> 0 limit and per-eps samples
    """
    switching = _switching_for(params, switching)
    omega1 = params.omega1

    def make_integrand(kernel):
        def integrand(tau, tau_prime):
            return (
                MU_10_SQUARED
                * switching(tau) * switching(tau_prime)
                * np.exp(-1j * omega1 * (tau - tau_prime))
                * field_kernel.wightman_inertial(kernel, tau, tau_prime)
            )
        return integrand

    samples, worst, refinements = _integrate_levels(
        params, switching, make_integrand, mode="hermitian"
    )
    extrapolation = extrapolate_eps(
        samples,
        degree=degree or settings.extrapolation_degree,
        noise_floor=NOISE_FACTOR * worst,
    )
    value = extrapolation.limit.real
    if value < -(extrapolation.error_estimate + worst):
        logger.warning("F_q = %.3e is negative beyond its error estimate", value)
    return ResponseEstimate(
        value=value,
        error_estimate=extrapolation.error_estimate,
        converged=extrapolation.converged,
        extrapolated=True,
        samples=[(eps, complex(v)) for eps, v in samples],
        quadrature_error=worst,
        refinements=refinements,
    )


def _plateau_spread(values: List[float]) -> float:
    tail = values[-PLATEAU_LEVELS:]
    centre = abs(sum(tail) / len(tail))
    if centre == 0.0:
        return float("inf")
    return (max(tail) - min(tail)) / centre


def f_beta_quadrature(params: HarvestParams, switching: Optional[SwitchingFunction] = None,
                      degree: Optional[int] = None) -> ResponseEstimate:
    """The (2, 0) element per lambda^2 from the time-ordered double integral.

    Only the real part has an eps -> 0 limit; eps * Im is returned as a
    plateau diagnostic. With unequal gaps the value is the real part at the
    smallest eps and is marked as not extrapolated.
    """
    switching = _switching_for(params, switching)
    omega1, omega2 = params.omega1, params.omega2

    def make_integrand(kernel):
        def integrand(tau, tau_prime):
            return (
                -MU_21_MU_10
                * switching(tau) * switching(tau_prime)
                * np.exp(1j * (omega1 * tau_prime + omega2 * tau))
                * field_kernel.wightman_inertial(kernel, tau, tau_prime)
            )
        return integrand

    samples, worst, refinements = _integrate_levels(
        params, switching, make_integrand, mode="lower"
    )
    eps_imag = [eps * complex(v).imag for eps, v in samples]
    spread = _plateau_spread(eps_imag) if len(eps_imag) >= PLATEAU_LEVELS else None

    if not params.equal:
        logger.info("Unequal gaps: Re F_beta reported at eps=%.3e without extrapolation",
                    samples[-1][0])
        return ResponseEstimate(
            value=complex(samples[-1][1]).real,
            error_estimate=float("nan"),
            converged=False,
            extrapolated=False,
            samples=samples,
            quadrature_error=worst,
        refinements=refinements,
            eps_imag=eps_imag,
            plateau_spread=spread,
        )

    extrapolation = extrapolate_eps(
        [(eps, complex(v).real) for eps, v in samples],
        degree=degree or settings.extrapolation_degree,
        noise_floor=NOISE_FACTOR * worst,
    )
    return ResponseEstimate(
        value=extrapolation.limit.real,
        error_estimate=extrapolation.error_estimate,
        converged=extrapolation.converged,
        extrapolated=True,
        samples=samples,
        quadrature_error=worst,
        refinements=refinements,
        eps_imag=eps_imag,
        plateau_spread=spread,
    )


def run_pipeline(params: HarvestParams, method: str = "closed") -> HarvestResult:
    """Detector state, and its mana by the general, family and closed routes.

    Args:
        params: Coupling, equal gaps, switching scale and quadrature settings
        method: "closed" for the closed forms, "quadrature" for the regulated
            double integrals extrapolated to eps -> 0

    Returns:
        HarvestResult with the assembled state and all three mana values.
        Perturbative-validity and positivity problems are listed in
        ``warnings`` rather than raised.

    Raises:
        GapMismatchError: The gaps differ
        FamilyStateError: lambda^2 F_q exceeds 1, leaving no ground population
        QuadratureError: A regulated integral missed its tolerance
    """
    if method not in METHODS:
        raise ValueError(f"Unknown method '{method}'. Valid options: {', '.join(METHODS)}")
    _require_equal_gaps(params)

    warnings = []
    f_q = f_beta = None
    lam2 = params.coupling ** 2
    if method == "closed":
        q = q_closed(params)
        beta = complex(beta_closed(params), 0.0)
    else:
        f_q = f_q_quadrature(params)
        f_beta = f_beta_quadrature(params)
        q = lam2 * f_q.value
        beta = complex(lam2 * f_beta.value, 0.0)
        for name, estimate in (("F_q", f_q), ("Re F_beta", f_beta)):
            if not estimate.converged:
                warnings.append(f"{name} eps extrapolation did not converge")

    if q > settings.perturbative_warning_threshold:
        warnings.append(
            f"lambda^2 F_q = {q:.3e} exceeds {settings.perturbative_warning_threshold:g}; "
            "second-order truncation is unreliable"
        )

    for message in warnings:
        logger.warning(message)

    family = DetectorFamilyState(p=1.0 - q, q=q, beta=beta)
    smallest = float(np.linalg.eigvalsh(family_matrix(family))[0])
    psd_tolerance = settings.perturbative_psd_tolerance
    if smallest < -psd_tolerance:
        message = (
            f"truncated state is not positive (eigenvalue {smallest:.3e} below "
            f"-{psd_tolerance:g}); mana values are those of the truncated matrix"
        )
        logger.warning(message)
        warnings.append(message)
        psd_tolerance = None
    elif smallest < -settings.psd_tolerance:
        # the {0, 2} block has determinant -|beta|^2 at this order
        message = f"truncated state has eigenvalue {smallest:.3e}; accepted"
        logger.info(message)
        warnings.append(message)
    rho = assemble_state(family, psd_tolerance=psd_tolerance)

    return HarvestResult(
        params=params,
        method=method,
        q=q,
        beta=beta,
        rho=rho,
        mana_general=mana(rho),
        mana_family=family_mana(q, beta),
        mana_closed=mana_closed(params),
        f_q=f_q,
        f_beta=f_beta,
        warnings=warnings,
    )


def sweep(x_min: float, x_max: float, steps: int, coupling: float, method: str = "closed",
          sigma_t: float = 1.0, workers: Optional[int] = None,
          quadrature: Optional[QuadratureSpec] = None,
          eps: Optional[EpsilonSchedule] = None) -> List[SweepRow]:
    """Scan x = omega * sigma_t over a uniform grid at fixed sigma_t.

    Points may run in parallel; rows come back in grid order.

    Args:
        x_min: First grid point, >= 0
        x_max: Last grid point, > x_min
        steps: Number of grid points, >= 2
        coupling: lambda, shared by every point
        method: "closed" or "quadrature"
        sigma_t: Switching scale held fixed while omega = x / sigma_t varies
        workers: Threads evaluating points (default settings.sweep_workers)

    Returns:
        One SweepRow per grid point
    """
    if not 0.0 <= x_min < x_max:
        raise ValueError(f"need 0 <= x_min < x_max, got [{x_min}, {x_max}]")
    if steps < 2:
        raise ValueError(f"steps must be at least 2, got {steps}")
    workers = workers or settings.sweep_workers
    grid = np.linspace(x_min, x_max, steps)

    def point(x: float) -> SweepRow:
        params = HarvestParams.equal_gaps(
            coupling, x / sigma_t, sigma_t, quadrature=quadrature, eps=eps
        )
        return SweepRow.from_result(run_pipeline(params, method), omega_sigma=float(x))

    if workers <= 1:
        return [point(x) for x in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(point, grid))


def optimize(coupling: float, bounds: Tuple[float, float] = (0.0, 5.0)) -> OptimizationResult:
    """Maximise the closed-form mana over x with bounded Brent iteration.

    Args:
        coupling: lambda; only scales mana_star
        bounds: Bracket (lo, hi) in x; the stationarity function must change
            sign from positive to negative across it

    Returns:
        OptimizationResult with x_star and the Newton-step residual

    Raises:
        OptimizationError: No interior maximum in the bracket
    """
    lo, hi = bounds
    if not 0.0 <= lo < hi:
        raise ValueError(f"invalid bracket [{lo}, {hi}]")
    if not mana_stationarity(lo) > 0.0 > mana_stationarity(hi):
        raise OptimizationError(f"no interior maximum bracketed by [{lo}, {hi}]")

    result = minimize_scalar(
        lambda x: -mana_per_lambda2(x),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-10},
    )
    x_star = float(result.x)
    edge = 1e-6 * (hi - lo)
    if not result.success or x_star - lo < edge or hi - x_star < edge:
        raise OptimizationError(f"maximiser stopped at the bracket edge x={x_star}")

    residual = abs(mana_stationarity(x_star) / _stationarity_slope(x_star))
    if residual > X_RESIDUAL_TOL:
        raise OptimizationError(f"stationarity residual {residual:.3e} above {X_RESIDUAL_TOL:g}")

    per_lambda2 = mana_per_lambda2(x_star)
    return OptimizationResult(
        x_star=x_star,
        mana_star=coupling ** 2 * per_lambda2,
        mana_star_per_lambda2=per_lambda2,
        x_residual=residual,
        evaluations=int(result.nfev),
    )
