"""Map failures onto the CLI exit-code contract and log them with context."""
import logging
from typing import Tuple

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4


class VerificationFailed(Exception):
    """One or more acceptance criteria failed."""
    def __init__(self, message, failed=None):
        super().__init__(message)
        self.failed = failed or []


class ErrorHandler:
    """Categorize exceptions by class name along their MRO.

    Categories are tried in order, so a StateFileError (a ValueError) is a
    parse failure rather than a domain failure.
    """

    CATEGORIES = (
        ('verification', EXIT_VERIFICATION, ('VerificationFailed',)),
        ('parse', EXIT_PARSE, (
            'StateFileError',
            'ConfigValidationError',
            'JSONDecodeError',
            'UnicodeDecodeError',
            'ValidationError',
        )),
        ('io', EXIT_IO, (
            'FileNotFoundError',
            'PermissionError',
            'IsADirectoryError',
            'OSError',
        )),
        ('domain', EXIT_DOMAIN, (
            'StateValidationError',
            'FamilyStateError',
            'GapMismatchError',
            'QuadratureError',
            'OptimizationError',
            'ValueError',
            'ArithmeticError',
        )),
    )

    def categorize_error(self, error: Exception) -> Tuple[str, int]:
        """Return (category, exit_code) for an exception."""
        names = [cls.__name__ for cls in type(error).__mro__]
        for category, code, members in self.CATEGORIES:
            if any(name in members for name in names):
                return category, code
        return 'unknown', EXIT_DOMAIN

    def describe(self, error: Exception) -> str:
        errors = getattr(error, 'errors', None)
        if callable(errors):
            errors = None
        lines = [f"{type(error).__name__}: {str(error).splitlines()[0] if str(error) else ''}"]
        for item in errors or []:
            lines.append(f"  - {item}")
        return "\n".join(lines)

    def handle(self, error: Exception) -> int:
        """Log the error and return the exit code for it.

        Args:
            error: Exception raised by a CLI command

        Returns:
            Exit code of the error's category; unknown errors are logged
            with their traceback and map to the domain code
        """
        category, code = self.categorize_error(error)
        message = self.describe(error)
        if category == 'unknown':
            logger.exception("Unexpected failure: %s", message)
        else:
            logger.debug("%s failure: %s", category, message)
        return code
