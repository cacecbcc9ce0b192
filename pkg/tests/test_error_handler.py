import json

import pytest

from services.config_validator import ConfigValidationError
from services.detector import FamilyStateError
from services.error_handler import (
    EXIT_DOMAIN,
    EXIT_IO,
    EXIT_PARSE,
    EXIT_VERIFICATION,
    ErrorHandler,
    VerificationFailed,
)
from services.harvest import GapMismatchError, OptimizationError
from services.quadrature import QuadratureError
from services.state_validator import StateValidationError
from services.storage import StateFileError


@pytest.mark.unit
class TestErrorHandler:
    """Test suite for ErrorHandler."""

    @pytest.fixture
    def error_handler(self):
        """Create an ErrorHandler instance."""
        return ErrorHandler()

    def test_verification_failure(self, error_handler):
        """Failed acceptance criteria exit with 1."""
        error = VerificationFailed("failed criteria: q_oracle", ["q_oracle"])
        assert error_handler.categorize_error(error) == ('verification', EXIT_VERIFICATION)

    @pytest.mark.parametrize("error", [
        StateFileError("bad file"),
        ConfigValidationError("bad config"),
        json.JSONDecodeError("Expecting value", "", 0),
        UnicodeDecodeError("utf-8", b"\xff\xfe", 0, 1, "invalid start byte"),
    ])
    def test_parse_failures(self, error_handler, error):
        """Malformed input exits with 2 even when it subclasses ValueError."""
        assert error_handler.categorize_error(error) == ('parse', EXIT_PARSE)

    @pytest.mark.parametrize("error", [
        FileNotFoundError("missing.json"),
        PermissionError("read-only"),
        IsADirectoryError("out/"),
    ])
    def test_io_failures(self, error_handler, error):
        """Filesystem failures exit with 4."""
        assert error_handler.categorize_error(error) == ('io', EXIT_IO)

    @pytest.mark.parametrize("error", [
        StateValidationError("not hermitian", ["hermiticity: ..."]),
        FamilyStateError("negative p"),
        GapMismatchError("unequal gaps"),
        QuadratureError("tolerance not met"),
        OptimizationError("edge"),
        ValueError("x must be positive"),
        ZeroDivisionError("division by zero"),
    ])
    def test_domain_failures(self, error_handler, error):
        """Numerical and invariant failures exit with 3."""
        assert error_handler.categorize_error(error) == ('domain', EXIT_DOMAIN)

    def test_unknown_errors_use_domain_code(self, error_handler, caplog):
        """Unexpected exceptions are logged with a traceback."""
        error = KeyError("oops")
        with caplog.at_level("ERROR"):
            code = error_handler.handle(error)
        assert code == EXIT_DOMAIN
        assert "Unexpected failure" in caplog.text

    def test_describe_lists_invariants(self, error_handler):
        """describe names each violated invariant on its own line."""
        error = StateValidationError(
            "Invalid density matrix:\n  - dimension: expected odd n >= 3, got 4",
            ["dimension: expected odd n >= 3, got 4"],
        )
        text = error_handler.describe(error)
        assert text.splitlines()[0] == "StateValidationError: Invalid density matrix:"
        assert "  - dimension: expected odd n >= 3, got 4" in text

    def test_describe_ignores_callable_errors_attribute(self, error_handler):
        """pydantic-style errors() methods are not iterated."""
        class WithMethod(ValueError):
            def errors(self):
                return ["hidden"]

        assert "hidden" not in error_handler.describe(WithMethod("boom"))

    def test_handle_returns_code(self, error_handler):
        """handle maps through categorize_error."""
        assert error_handler.handle(FileNotFoundError("x")) == EXIT_IO
