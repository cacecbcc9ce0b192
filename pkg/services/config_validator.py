"""Validation of settings and per-run CLI configuration."""
import math
from typing import List, Tuple

VALID_METHODS = ('closed', 'quadrature')
VALID_FORMATS = ('csv', 'json')
VALID_LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')
MIN_EPS_LEVELS = 3
# lambda^2 q at omega * sigma_t = 0 is lambda^2 / (8 pi); at this coupling p reaches 0
MAX_STATE_COUPLING = math.sqrt(8.0 * math.pi)
STATE_COMMANDS = ('harvest', 'sweep')


class ConfigValidationError(Exception):
    """Raised when configuration validation fails."""
    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or []


class ConfigValidator:
    """Validate the numerical settings on startup."""

    NUMERIC_RANGES = [
        ('coupling', 0.0, 10.0),
        ('omega', 0.0, 1e6),
        ('sigma_t', 1e-12, 1e12),
        ('truncation_radius', 4.0, 40.0),
        ('quad_abs_tol', 1e-16, 1e-2),
        ('quad_order', 3, 200),
        ('quad_check_order', 2, 199),
        ('quad_panel_width', 1e-3, 10.0),
        ('quad_max_refinements', 0, 8),
        ('quad_workers', 1, 256),
        ('eps_k_min', 0, 40),
        ('eps_k_max', 0, 40),
        ('extrapolation_degree', 1, 4),
        ('psd_tolerance', 0.0, 1.0),
        ('perturbative_psd_tolerance', 0.0, 1.0),
        ('perturbative_warning_threshold', 0.0, 1.0),
        ('sweep_workers', 1, 256),
    ]

    def __init__(self, config=None):
        """Initialize validator with optional config override."""
        if config is None:
            # Import here to avoid circular dependency
            from config import settings
            self.config = settings
        else:
            self.config = config
        self.errors: List[str] = []

    def validate_all(self) -> Tuple[bool, List[str]]:
        """Run all validations and return (is_valid, errors)."""
        self.errors = []

        self._validate_numeric_ranges()
        self._validate_positive()
        self._validate_rule_orders()
        self._validate_eps_levels()
        self._validate_choices()

        if self.errors:
            return False, self.errors
        return True, []

    def validate_or_raise(self):
        """Validate and raise ConfigValidationError if invalid."""
        is_valid, errors = self.validate_all()
        if not is_valid:
            error_message = "Configuration validation failed:\n" + "\n".join(
                f"  ✗ {error}" for error in errors
            )
            raise ConfigValidationError(error_message, errors)

    def _validate_numeric_ranges(self):
        for field, min_val, max_val in self.NUMERIC_RANGES:
            value = getattr(self.config, field, None)
            if value is not None:
                if not (min_val <= value <= max_val):
                    self.errors.append(
                        f"{field} out of range. "
                        f"Expected {min_val}-{max_val}, got {value}"
                    )

    def _validate_positive(self):
        for field in ('coupling', 'sigma_t', 'quad_abs_tol'):
            value = getattr(self.config, field, None)
            if value is not None and not value > 0:
                self.errors.append(f"{field} must be > 0, got {value}")

    def _validate_rule_orders(self):
        order = getattr(self.config, 'quad_order', None)
        check = getattr(self.config, 'quad_check_order', None)
        if order is not None and check is not None and not check < order:
            self.errors.append(
                f"quad_check_order ({check}) must be lower than quad_order ({order})"
            )

    def _validate_eps_levels(self):
        k_min = getattr(self.config, 'eps_k_min', None)
        k_max = getattr(self.config, 'eps_k_max', None)
        if k_min is None or k_max is None:
            return
        if k_max - k_min + 1 < MIN_EPS_LEVELS:
            self.errors.append(
                f"eps levels {k_min}..{k_max} give fewer than {MIN_EPS_LEVELS} samples"
            )

    def _validate_choices(self):
        method = getattr(self.config, 'method', None)
        if method is not None and method not in VALID_METHODS:
            self.errors.append(
                f"Invalid method '{method}'. Valid options: {', '.join(VALID_METHODS)}"
            )
        level = getattr(self.config, 'log_level', None)
        if level is not None and str(level).upper() not in VALID_LOG_LEVELS:
            self.errors.append(
                f"Invalid log_level '{level}'. Valid options: {', '.join(VALID_LOG_LEVELS)}"
            )


class RunConfigValidator(ConfigValidator):
    """Validate a RunConfig assembled from CLI flags."""

    NUMERIC_RANGES = [
        ('coupling', 0.0, 10.0),
        ('omega', 0.0, 1e6),
        ('sigma_t', 1e-12, 1e12),
        ('tol', 1e-16, 1e-2),
        ('workers', 1, 256),
        ('steps', 2, 1_000_000),
        ('eps_k_min', 0, 40),
        ('eps_k_max', 0, 40),
    ]

    def validate_all(self) -> Tuple[bool, List[str]]:
        self.errors = []

        self._validate_numeric_ranges()
        self._validate_positive()
        self._validate_eps_levels()
        self._validate_choices()
        self._validate_format()
        self._validate_coupling()
        self._validate_range()
        self._validate_state_file()

        if self.errors:
            return False, self.errors
        return True, []

    def _validate_format(self):
        fmt = getattr(self.config, 'format', None)
        if fmt is not None and fmt not in VALID_FORMATS:
            self.errors.append(
                f"Invalid format '{fmt}'. Valid options: {', '.join(VALID_FORMATS)}"
            )

    def _validate_coupling(self):
        if getattr(self.config, 'command', None) not in STATE_COMMANDS:
            return
        coupling = getattr(self.config, 'coupling', None)
        if coupling is not None and coupling >= MAX_STATE_COUPLING:
            self.errors.append(
                f"coupling {coupling:g} leaves no ground population in the second-order "
                f"state; use lambda < {MAX_STATE_COUPLING:.4f}"
            )

    def _validate_range(self):
        if getattr(self.config, 'command', None) != 'sweep':
            return
        x_min, x_max = self.config.x_min, self.config.x_max
        if not 0.0 <= x_min < x_max:
            self.errors.append(f"sweep range must satisfy 0 <= min < max, got [{x_min}, {x_max}]")

    def _validate_state_file(self):
        if getattr(self.config, 'command', None) == 'mana' and not self.config.state_file:
            self.errors.append("mana command requires a state file")
