"""Deterministic panel Gauss-Legendre quadrature and eps -> 0 extrapolation.

Every integral is a sum of per-panel partial sums. Panels are fixed by the
break points and the refinement level, and partial sums are combined with
math.fsum in panel order, so the result does not depend on how many worker
threads evaluated the panels.
"""
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from models.quadrature import ExtrapolationResult, QuadratureResult, QuadratureSpec
from services.retry_handler import RefinementNeeded, RefinementRetry

logger = logging.getLogger(__name__)

EPS_MACH = float(np.finfo(float).eps)
ROUNDOFF_FACTOR = 50.0
NOISE_FACTOR = 64.0
MODES = ("lower", "full", "hermitian")

Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]


class QuadratureError(RuntimeError):
    """Tolerance not reached after the maximal refinement level."""
    def __init__(self, message, value=None, error_estimate=None, tolerance=None, level=None,
                 attempts=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
        self.tolerance = tolerance
        self.level = level
        self.attempts = attempts


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the order-point rule on [-1, 1] (read-only)."""
    if order < 1:
        raise ValueError(f"order must be positive, got {order}")
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def uniform_breaks(a: float, b: float, width: float) -> np.ndarray:
    if not b > a:
        raise ValueError(f"empty interval [{a}, {b}]")
    count = max(1, math.ceil((b - a) / width - 1e-9))
    return np.linspace(a, b, count + 1)


def graded_breaks(a: float, b: float, scale: float, width: float) -> np.ndarray:
    """Breaks on [a, b] resolving structure of size ``scale`` at ``a``.

    The first panel is [a, a + scale]; each following panel is as wide as
    its distance from ``a`` until that reaches ``width``, after which the
    panels are uniform.
    """
    if not b > a:
        raise ValueError(f"empty interval [{a}, {b}]")
    if scale >= b - a:
        return np.array([a, b])
    breaks = [a, a + scale]
    distance = scale
    while distance < width and a + 2.0 * distance < b:
        distance *= 2.0
        breaks.append(a + distance)
    if breaks[-1] < b:
        tail = uniform_breaks(breaks[-1], b, width)
        breaks.extend(tail[1:].tolist())
    return np.array(breaks)


def refine_breaks(breaks: Sequence[float], level: int) -> np.ndarray:
    """Split every panel into 2**level equal parts."""
    breaks = np.asarray(breaks, dtype=float)
    if level <= 0:
        return breaks
    parts = 2 ** level
    pieces = [
        np.linspace(lo, hi, parts + 1)[:-1] for lo, hi in zip(breaks[:-1], breaks[1:])
    ]
    return np.append(np.concatenate(pieces), breaks[-1])


def composite_rule(breaks: Sequence[float], order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights per panel, shaped (panels, order)."""
    breaks = np.asarray(breaks, dtype=float)
    nodes, weights = gauss_legendre(order)
    half = 0.5 * np.diff(breaks)[:, None]
    mid = 0.5 * (breaks[:-1] + breaks[1:])[:, None]
    return mid + half * nodes[None, :], half * weights[None, :]


def _reduce(partials: List[complex]) -> complex:
    return complex(
        math.fsum(p.real for p in partials),
        math.fsum(p.imag for p in partials),
    )


def _map_panels(func, panels, workers: int) -> list:
    if workers <= 1:
        return [func(panel) for panel in panels]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, panels))


def _finish(hi: complex, lo: complex, mass: float) -> float:
    return abs(hi - lo) + ROUNDOFF_FACTOR * EPS_MACH * mass


def _run_with_refinement(compute: Callable[[int], QuadratureResult],
                         spec: QuadratureSpec) -> QuadratureResult:
    tolerance = spec.target_abs_tol

    def attempt(level: int) -> QuadratureResult:
        result = compute(level)
        if not result.error_estimate <= tolerance:
            raise RefinementNeeded(result, tolerance)
        return result

    retry = RefinementRetry(spec.max_refinements)
    try:
        result = retry.run(attempt)
    except RefinementNeeded as e:
        raise QuadratureError(
            f"quadrature tolerance {tolerance:.3e} not met at refinement level "
            f"{e.result.refinement_level}; achieved estimate {e.result.error_estimate:.3e}",
            value=e.result.value,
            error_estimate=e.result.error_estimate,
            tolerance=tolerance,
            level=e.result.refinement_level,
            attempts=retry.get_retry_stats()['total_attempts'],
        ) from e
    result.attempts = retry.get_retry_stats()['total_attempts']
    return result


def integrate1d(f: Callable[[np.ndarray], np.ndarray], breaks: Sequence[float],
                order: int = 20, check_order: int = 14) -> QuadratureResult:
    """Single composite pass; error estimated against the check_order rule."""

    def rule_sum(n: int):
        x, w = composite_rule(breaks, n)
        values = np.asarray(f(x), dtype=complex)
        partials = [complex(p) for p in (w * values).sum(axis=1)]
        return _reduce(partials), float(np.sum(np.abs(w * values))), values.size

    hi, mass, evaluations = rule_sum(order)
    lo, _, check_evaluations = rule_sum(check_order)
    return QuadratureResult(
        value=hi,
        error_estimate=_finish(hi, lo, mass),
        evaluations=evaluations + check_evaluations,
    )


def integrate2d(f: Integrand, x_range: Tuple[float, float], y_range: Tuple[float, float],
                spec: Optional[QuadratureSpec] = None,
                x_breaks: Optional[Sequence[float]] = None,
                y_breaks: Optional[Sequence[float]] = None) -> QuadratureResult:
    """Tensor-product panel quadrature of f(x, y) over a rectangle.

    Raises QuadratureError when the nested-rule estimate stays above
    spec.target_abs_tol after spec.max_refinements dyadic refinements.
    """
    spec = spec or QuadratureSpec()
    if x_breaks is None:
        x_breaks = uniform_breaks(x_range[0], x_range[1], spec.panel_width)
    if y_breaks is None:
        y_breaks = uniform_breaks(y_range[0], y_range[1], spec.panel_width)

    def rule_sum(xb, yb, n: int):
        x_nodes, x_weights = composite_rule(xb, n)
        y_nodes, y_weights = composite_rule(yb, n)
        y_flat, wy = y_nodes.ravel(), y_weights.ravel()

        def panel_sum(i: int):
            x = x_nodes[i][:, None]
            values = np.asarray(f(x, y_flat[None, :]), dtype=complex)
            weighted = x_weights[i][:, None] * wy[None, :] * values
            return complex(weighted.sum()), float(np.abs(weighted).sum())

        sums = _map_panels(panel_sum, range(x_nodes.shape[0]), spec.workers)
        value = _reduce([s for s, _ in sums])
        mass = math.fsum(m for _, m in sums)
        return value, mass, x_nodes.size * y_flat.size

    def compute(level: int) -> QuadratureResult:
        xb = refine_breaks(x_breaks, level)
        yb = refine_breaks(y_breaks, level)
        hi, mass, evaluations = rule_sum(xb, yb, spec.order)
        lo, _, check_evaluations = rule_sum(xb, yb, spec.check_order)
        return QuadratureResult(
            value=hi,
            error_estimate=_finish(hi, lo, mass),
            evaluations=evaluations + check_evaluations,
            refinement_level=level,
        )

    return _run_with_refinement(compute, spec)


def integrate_near_diagonal(f: Integrand, radius: float, scale: float,
                            spec: Optional[QuadratureSpec] = None,
                            mode: str = "full",
                            width: Optional[float] = None) -> QuadratureResult:
    """Integrate f(tau, tau') over the square |tau|, |tau'| <= radius.

    The square is parametrised by s = tau - tau' > 0 and u = (tau + tau')/2,
    |u| <= radius - s/2. Panels in s start at ``scale`` next to the diagonal
    and double outwards, so kernels peaked at s ~ scale are resolved.

    Args:
        f: Vectorised integrand f(tau, tau')
        radius: Half-width of the square
        scale: Width of the panel touching the diagonal (the regulator eps)
        spec: Rule orders, tolerance, refinement budget and worker count
        mode:
            "lower"      integral over tau > tau' only
            "full"       f(tau, tau') + f(tau', tau) paired node by node
            "hermitian"  as "full" for integrands with
                         f(tau', tau) = conj f(tau, tau'); the paired
                         imaginary part is dropped and reported as
                         ``asymmetry``
        width: Widest panel in s and u (default spec.panel_width)

    Returns:
        QuadratureResult with the refinement level and attempt count used

    Raises:
        QuadratureError: The estimate stays above spec.target_abs_tol
    """
    if mode not in MODES:
        raise ValueError(f"Unknown mode '{mode}'. Valid options: {', '.join(MODES)}")
    spec = spec or QuadratureSpec()
    width = width if width is not None else spec.panel_width
    s_base = graded_breaks(0.0, 2.0 * radius, scale, width)
    u_base = uniform_breaks(-1.0, 1.0, width / radius)

    def rule_sum(s_breaks, u_breaks, n: int):
        s_nodes, s_weights = composite_rule(s_breaks, n)
        u_nodes, u_weights = composite_rule(u_breaks, n)
        u_flat, wu = u_nodes.ravel(), u_weights.ravel()

        def panel_sum(i: int):
            s = s_nodes[i][:, None]
            half_length = radius - 0.5 * s
            u = half_length * u_flat[None, :]
            tau, tau_prime = u + 0.5 * s, u - 0.5 * s
            values = np.asarray(f(tau, tau_prime), dtype=complex)
            if mode != "lower":
                values = values + np.asarray(f(tau_prime, tau), dtype=complex)
            weighted = (s_weights[i][:, None] * half_length) * wu[None, :] * values
            return complex(weighted.sum()), float(np.abs(weighted).sum())

        sums = _map_panels(panel_sum, range(s_nodes.shape[0]), spec.workers)
        value = _reduce([s for s, _ in sums])
        mass = math.fsum(m for _, m in sums)
        calls = 1 if mode == "lower" else 2
        return value, mass, calls * s_nodes.size * u_flat.size

    def compute(level: int) -> QuadratureResult:
        sb = refine_breaks(s_base, level)
        ub = refine_breaks(u_base, level)
        hi, mass, evaluations = rule_sum(sb, ub, spec.order)
        lo, _, check_evaluations = rule_sum(sb, ub, spec.check_order)
        asymmetry = 0.0
        if mode == "hermitian":
            asymmetry = abs(hi.imag)
            hi, lo = complex(hi.real, 0.0), complex(lo.real, 0.0)
        return QuadratureResult(
            value=hi,
            error_estimate=_finish(hi, lo, mass),
            evaluations=evaluations + check_evaluations,
            refinement_level=level,
            asymmetry=asymmetry,
        )

    return _run_with_refinement(compute, spec)


def extrapolate_eps(samples: Sequence[Tuple[float, complex]], degree: int = 2,
                    noise_floor: Optional[float] = None) -> ExtrapolationResult:
    """Richardson extrapolation of (eps, value) pairs to eps = 0.

    Neville's table is built with polynomial degree capped at ``degree``.
    The error estimate adds the change between the last two rows and the
    change between the last two degrees. The sequence is flagged as not
    converged when the row-to-row change grows at the last level by more
    than ``noise_floor`` (default: 64 ulp of the largest sample).

    Args:
        samples: (eps, value) pairs with eps positive and strictly decreasing
        degree: Highest polynomial degree in eps
        noise_floor: Growth below this is treated as quadrature noise

    Returns:
        ExtrapolationResult with the limit, its error estimate and the table

    Raises:
        ValueError: Fewer than 3 samples, or eps not strictly decreasing
    """
    samples = [(float(eps), complex(v)) for eps, v in samples]
    if len(samples) < 3:
        raise ValueError(f"need at least 3 samples, got {len(samples)}")
    eps = [e for e, _ in samples]
    if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps values must be positive and strictly decreasing")

    n = len(samples)
    top = min(degree, n - 2)
    table: List[List[complex]] = []
    for i, (_, value) in enumerate(samples):
        row = [value]
        for j in range(1, min(i, top) + 1):
            prev_row = table[i - 1]
            row.append(row[j - 1] + (row[j - 1] - prev_row[j - 1]) * eps[i] / (eps[i - j] - eps[i]))
        table.append(row)

    last = n - 1
    limit = table[last][top]
    changes = [abs(table[i][top] - table[i - 1][top]) for i in range(top + 1, n)]
    error_estimate = changes[-1] + abs(table[last][top] - table[last][top - 1])

    if noise_floor is None:
        noise_floor = NOISE_FACTOR * EPS_MACH * max(abs(v) for _, v in samples)
    converged = True
    if len(changes) >= 2:
        converged = changes[-1] <= max(changes[-2], noise_floor)

    if not converged:
        logger.warning(
            "eps extrapolation not converging: last changes %.3e -> %.3e",
            changes[-2], changes[-1],
        )
    return ExtrapolationResult(
        limit=limit,
        error_estimate=float(error_estimate),
        converged=converged,
        table=table,
        samples=samples,
    )
