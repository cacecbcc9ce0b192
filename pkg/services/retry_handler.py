"""Refinement retries for quadrature that misses its tolerance."""
import logging
from typing import Callable, TypeVar

from tenacity import (
    Retrying,
    before_sleep_log,
    retry_if_exception_type,
    stop_after_attempt,
    wait_none,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")


class RefinementNeeded(Exception):
    """Raised by an attempt whose error estimate exceeds the tolerance."""
    def __init__(self, result, tolerance: float):
        super().__init__(
            f"error estimate {result.error_estimate:.3e} exceeds tolerance {tolerance:.3e}"
        )
        self.result = result
        self.tolerance = tolerance


class RefinementRetry:
    """Re-run a computation at successively finer dyadic panel levels.

    ``func(level)`` is called with level 0, 1, ... and must either return a
    result or raise RefinementNeeded. After ``max_refinements`` extra levels
    the last RefinementNeeded propagates to the caller.
    """

    def __init__(self, max_refinements: int = 3):
        self.max_refinements = max_refinements
        self.retry_stats = {
            'total_attempts': 0,
            'refinements': 0,
            'exhausted': 0,
        }

    def run(self, func: Callable[[int], T]) -> T:
        """Call func at increasing refinement levels until it succeeds.

        Args:
            func: Takes the refinement level and returns a result or raises
                RefinementNeeded

        Returns:
            The first result func returns

        Raises:
            RefinementNeeded: Still raised at level max_refinements
        """
        retrying = Retrying(
            stop=stop_after_attempt(self.max_refinements + 1),
            wait=wait_none(),
            retry=retry_if_exception_type(RefinementNeeded),
            before_sleep=before_sleep_log(logger, logging.DEBUG),
            reraise=True,
        )
        try:
            for attempt in retrying:
                with attempt:
                    level = attempt.retry_state.attempt_number - 1
                    self.retry_stats['total_attempts'] += 1
                    if level > 0:
                        self.retry_stats['refinements'] += 1
                    return func(level)
        except RefinementNeeded as e:
            self.retry_stats['exhausted'] += 1
            logger.warning(
                "Tolerance not met after %d refinement levels: %s",
                self.max_refinements, e,
            )
            raise

    def get_retry_stats(self) -> dict:
        """Counters over every run() call of this instance."""
        return dict(self.retry_stats)

