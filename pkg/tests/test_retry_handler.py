import pytest
from unittest.mock import Mock

from models.quadrature import QuadratureResult
from services.retry_handler import RefinementNeeded, RefinementRetry


def _result(level, estimate):
    return QuadratureResult(value=1.0 + 0j, error_estimate=estimate, evaluations=10,
                            refinement_level=level)


@pytest.mark.unit
class TestRefinementRetry:
    """Test suite for RefinementRetry."""

    @pytest.fixture
    def retry(self):
        """Create a RefinementRetry allowing three extra levels."""
        return RefinementRetry(max_refinements=3)

    def test_first_level_success_is_not_retried(self, retry):
        """A result within tolerance is returned at level 0."""
        func = Mock(return_value="done")
        assert retry.run(func) == "done"
        func.assert_called_once_with(0)
        assert retry.get_retry_stats() == {'total_attempts': 1, 'refinements': 0, 'exhausted': 0}

    def test_levels_increase_until_success(self, retry):
        """Each retry passes the next refinement level."""
        levels = []

        def compute(level):
            levels.append(level)
            if level < 2:
                raise RefinementNeeded(_result(level, 1e-3), 1e-6)
            return _result(level, 1e-9)

        result = retry.run(compute)
        assert levels == [0, 1, 2]
        assert result.refinement_level == 2
        assert retry.retry_stats['refinements'] == 2

    def test_exhaustion_reraises_last_attempt(self, retry, caplog):
        """After max_refinements the last RefinementNeeded propagates."""
        def compute(level):
            raise RefinementNeeded(_result(level, 1e-3), 1e-6)

        with caplog.at_level("WARNING"):
            with pytest.raises(RefinementNeeded) as excinfo:
                retry.run(compute)
        assert excinfo.value.result.refinement_level == 3
        assert retry.retry_stats == {'total_attempts': 4, 'refinements': 3, 'exhausted': 1}
        assert "Tolerance not met" in caplog.text

    def test_other_exceptions_are_not_retried(self, retry):
        """Errors unrelated to tolerance propagate immediately."""
        func = Mock(side_effect=FloatingPointError("overflow"))
        with pytest.raises(FloatingPointError):
            retry.run(func)
        assert func.call_count == 1

    def test_zero_refinements_allows_single_attempt(self):
        """max_refinements=0 means exactly one attempt."""
        retry = RefinementRetry(max_refinements=0)
        func = Mock(side_effect=RefinementNeeded(_result(0, 1.0), 1e-6))
        with pytest.raises(RefinementNeeded):
            retry.run(func)
        assert func.call_count == 1

    def test_stats_accumulate_across_runs(self, retry):
        """Counters add up over successive run() calls."""
        retry.run(lambda level: level)
        retry.run(lambda level: level)
        assert retry.get_retry_stats() == {'total_attempts': 2, 'refinements': 0, 'exhausted': 0}

    def test_message_reports_estimate_and_tolerance(self):
        """The exception text names both numbers."""
        error = RefinementNeeded(_result(1, 2.5e-4), 1e-8)
        assert "2.500e-04" in str(error)
        assert "1.000e-08" in str(error)
