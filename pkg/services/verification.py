"""Acceptance suite run by ``main.py verify``.

Each criterion is a method returning a CriterionResult; checks never raise
on a numerical mismatch, they report it. Random inputs come from fixed
seeds so that reports are reproducible.
"""
from dataclasses import dataclass
import logging
import math
from typing import Callable, List, Optional

import numpy as np

from config import settings
from models.detector_state import DetectorFamilyState
from models.harvest import HarvestParams
from models.phase_space import DensityMatrix, WeylIndex
from models.quadrature import EpsilonSchedule, QuadratureSpec
from services import detector, harvest, phase_space

logger = logging.getLogger(__name__)

ALGEBRA_TOL = 1e-12
ORACLE_GRID = (0.25, 0.5, 1.0, 2.0, 4.0)
Q_REL_TOL = 1e-4
Q_ABS_FLOOR = 1e-8
BETA_REL_TOL = 1e-3
PLATEAU_TOL = 0.05
LAMBDA4_COUPLINGS = (0.01, 0.02, 0.04)
LAMBDA4_RATIO = 16.0
LAMBDA4_SPREAD = 0.10
X_STAR = 0.752
X_STAR_TOL = 0.01
PEAK = 1.13e-2
PEAK_TOL = 2e-4
SEED = 20240611


@dataclass
class CriterionResult:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.detail}"


def random_density_matrix(n: int, rng: np.random.Generator) -> DensityMatrix:
    """Full-rank state from a complex Ginibre matrix."""
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = g @ g.conj().T
    return DensityMatrix(dim=n, entries=rho / np.trace(rho).real)


def random_family_state(rng: np.random.Generator) -> DetectorFamilyState:
    q = rng.uniform(0.0, 1.0)
    p = rng.uniform(0.0, 1.0 - q)
    r = max(1.0 - p - q, 0.0)
    radius = math.sqrt(p * r) * rng.uniform(0.0, 1.0)
    beta = radius * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
    return DetectorFamilyState(p=p, q=q, beta=complex(beta))


class AcceptanceSuite:
    """Runs the acceptance criteria in a fixed order."""

    def __init__(self, quadrature: Optional[QuadratureSpec] = None,
                 eps: Optional[EpsilonSchedule] = None):
        self.quadrature = quadrature or QuadratureSpec.from_settings(settings)
        self.eps = eps or EpsilonSchedule.dyadic(1.0, settings.eps_k_min, settings.eps_k_max)
        self.criteria: List[Callable[[], CriterionResult]] = [
            self.check_phase_space_algebra,
            self.check_stabilizer_zeros,
            self.check_family_formula,
            self.check_q_oracle,
            self.check_beta_oracle,
            self.check_lambda4_scaling,
            self.check_sweep_curve,
            self.check_selection_rules,
        ]

    def run(self) -> List[CriterionResult]:
        """Run every criterion in order.

        Returns:
            One CriterionResult per criterion; a criterion that raises is
            reported as failed with the exception in ``detail``
        """
        results = []
        for criterion in self.criteria:
            try:
                result = criterion()
            except Exception as e:
                result = CriterionResult(criterion.__name__[len("check_"):], False,
                                         f"raised {type(e).__name__}: {e}")
            logger.info("%s", result)
            results.append(result)
        return results

    def check_phase_space_algebra(self) -> CriterionResult:
        rng = np.random.default_rng(SEED)
        worst = 0.0
        for n in (3, 5, 7):
            ops = phase_space.phase_point_operators(n).reshape(n * n, n, n)
            identity = np.eye(n)
            worst = max(worst, float(np.max(np.abs(ops - ops.conj().transpose(0, 2, 1)))))
            worst = max(worst, float(np.max(np.abs(np.trace(ops, axis1=1, axis2=2) - 1.0))))
            gram = np.einsum("aij,bji->ab", ops, ops)
            worst = max(worst, float(np.max(np.abs(gram - n * np.eye(n * n)))))
            worst = max(worst, float(np.max(np.abs(ops.sum(axis=0) - n * identity))))

            rho = random_density_matrix(n, rng)
            w = phase_space.wigner(rho)
            worst = max(worst, abs(float(w.values.sum()) - 1.0))
            back = phase_space.reconstruct(w)
            worst = max(worst, float(np.max(np.abs(back.entries - rho.entries))))

            for a in range(n):
                for b in range(n):
                    shifted = phase_space.wigner(phase_space.displace(rho, WeylIndex(a, b)))
                    expected = np.roll(np.roll(w.values, a, axis=0), b, axis=1)
                    worst = max(worst, float(np.max(np.abs(shifted.values - expected))))
        return CriterionResult(
            "phase_space_algebra",
            worst <= ALGEBRA_TOL,
            f"max deviation {worst:.2e} (tolerance {ALGEBRA_TOL:g})",
        )

    def check_stabilizer_zeros(self) -> CriterionResult:
        states = phase_space.stabilizer_states(3) + [DensityMatrix.maximally_mixed(3)]
        worst = max(phase_space.mana(rho) for rho in states)
        strange = phase_space.mana(phase_space.strange_state())
        strange_error = abs(strange - math.log(5.0 / 3.0))
        return CriterionResult(
            "stabilizer_zeros",
            worst <= ALGEBRA_TOL and strange_error <= ALGEBRA_TOL,
            f"max stabilizer mana {worst:.2e}; strange state {strange:.15f} "
            f"(error {strange_error:.2e})",
        )

    def check_family_formula(self, samples: int = 1000) -> CriterionResult:
        rng = np.random.default_rng(SEED + 1)
        worst = 0.0
        for _ in range(samples):
            fam = random_family_state(rng)
            general = phase_space.mana(detector.assemble_state(fam))
            worst = max(worst, abs(general - detector.family_mana(fam.q, fam.beta)))
        return CriterionResult(
            "family_formula",
            worst <= ALGEBRA_TOL,
            f"{samples} random family states, max deviation {worst:.2e}",
        )

    def _params(self, x: float) -> HarvestParams:
        return HarvestParams.equal_gaps(1.0, x, 1.0, quadrature=self.quadrature, eps=self.eps)

    def check_q_oracle(self) -> CriterionResult:
        failures = []
        for x in ORACLE_GRID:
            estimate = harvest.f_q_quadrature(self._params(x))
            closed = harvest.q_per_lambda2(x)
            tolerance = max(Q_REL_TOL * abs(closed), Q_ABS_FLOOR)
            if not abs(estimate.value - closed) <= tolerance:
                failures.append(f"x={x}: {estimate.value:.10e} vs {closed:.10e}")
        detail = "; ".join(failures) if failures else f"F_q matches at x in {list(ORACLE_GRID)}"
        return CriterionResult("q_oracle", not failures, detail)

    def check_beta_oracle(self) -> CriterionResult:
        failures = []
        for x in ORACLE_GRID:
            estimate = harvest.f_beta_quadrature(self._params(x))
            closed = harvest.beta_per_lambda2(x)
            if not abs(estimate.value - closed) <= BETA_REL_TOL * abs(closed):
                failures.append(f"x={x}: Re {estimate.value:.10e} vs {closed:.10e}")
            if estimate.plateau_spread is None or not estimate.plateau_spread <= PLATEAU_TOL:
                failures.append(f"x={x}: eps*Im spread {estimate.plateau_spread}")
        detail = "; ".join(failures) if failures else f"Re F_beta matches at x in {list(ORACLE_GRID)}"
        return CriterionResult("beta_oracle", not failures, detail)

    def check_lambda4_scaling(self) -> CriterionResult:
        gaps = []
        for coupling in LAMBDA4_COUPLINGS:
            params = HarvestParams.equal_gaps(coupling, 1.0, 1.0)
            family = detector.family_mana(harvest.q_closed(params), harvest.beta_closed(params))
            gaps.append(abs(family - harvest.mana_closed(params)))
        ratios = [b / a if a > 0 else float("inf") for a, b in zip(gaps, gaps[1:])]
        passed = all(abs(r - LAMBDA4_RATIO) <= LAMBDA4_SPREAD * LAMBDA4_RATIO for r in ratios)
        return CriterionResult(
            "lambda4_scaling",
            passed,
            "ratios " + ", ".join(f"{r:.4f}" for r in ratios),
        )

    def check_sweep_curve(self, steps: int = 501) -> CriterionResult:
        rows = harvest.sweep(0.0, 5.0, steps, settings.coupling, method="closed", workers=1)
        x = np.array([row.omega_sigma for row in rows])
        curve = np.array([row.mana_closed_per_lambda2 for row in rows])
        expected = np.array([harvest.mana_per_lambda2(v) for v in x])
        problems = []
        if not np.allclose(curve, expected, rtol=1e-12, atol=1e-15):
            problems.append("closed column deviates from x erfc(x/sqrt2)/(12 sqrt(2 pi))")
        rises = np.sign(np.diff(curve))
        if int(np.count_nonzero(np.diff(rises) < 0)) != 1 or rises[0] <= 0 or rises[-1] >= 0:
            problems.append("curve does not have a single interior maximum")
        best = harvest.optimize(settings.coupling)
        if abs(best.x_star - X_STAR) > X_STAR_TOL:
            problems.append(f"x* = {best.x_star:.6f}")
        if abs(best.mana_star_per_lambda2 - PEAK) > PEAK_TOL:
            problems.append(f"M*/lambda^2 = {best.mana_star_per_lambda2:.6e}")
        grid_best = x[int(np.argmax(curve))]
        if abs(grid_best - best.x_star) > x[1] - x[0]:
            problems.append(f"grid argmax {grid_best} disagrees with x*")
        detail = "; ".join(problems) if problems else (
            f"x* = {best.x_star:.6f}, M*/lambda^2 = {best.mana_star_per_lambda2:.6e}"
        )
        return CriterionResult("sweep_curve", not problems, detail)

    def check_selection_rules(self, trials: int = 100, max_length: int = 6) -> CriterionResult:
        rng = np.random.default_rng(SEED + 2)
        violations = 0
        for _ in range(trials):
            m = int(rng.integers(1, max_length + 1))
            taus = rng.uniform(-5.0, 5.0, size=m).tolist()
            support = detector.parity_support(m, taus, 1.0, 1.0)
            allowed = {1} if m % 2 else {0, 2}
            if not support <= allowed:
                violations += 1
        return CriterionResult(
            "selection_rules",
            violations == 0,
            f"{trials} random products, {violations} violations",
        )


def all_passed(results: List[CriterionResult]) -> bool:
    return all(result.passed for result in results)
