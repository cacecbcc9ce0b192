import os
from pydantic_settings import BaseSettings
from services.config_validator import ConfigValidator, ConfigValidationError


class Settings(BaseSettings):
    # Physical defaults (equal gaps; sigma_t sets the time unit)
    coupling: float = 0.1
    omega: float = 1.0
    sigma_t: float = 1.0
    method: str = "closed"

    # Quadrature engine; lengths in units of sigma_t
    truncation_radius: float = 6.0
    quad_abs_tol: float = 1e-10
    quad_order: int = 20
    quad_check_order: int = 14
    quad_panel_width: float = 0.5
    quad_max_refinements: int = 3
    quad_workers: int = 1

    # eps_k = sigma_t * 2^-k for k = eps_k_min..eps_k_max
    eps_k_min: int = 4
    eps_k_max: int = 10
    extrapolation_degree: int = 2

    # Eigenvalue floors for density matrices
    psd_tolerance: float = 1e-10
    perturbative_psd_tolerance: float = 1e-3
    perturbative_warning_threshold: float = 0.05

    sweep_workers: int = 1

    log_level: str = "WARNING"

    class Config:
        env_file = ".env"
        env_prefix = "MANA_"
        case_sensitive = False


settings = Settings()

# Validate configuration on startup (skip if SKIP_CONFIG_VALIDATION env var is set)
skip_validation = os.getenv('SKIP_CONFIG_VALIDATION', '').lower() in ('1', 'true', 'yes')
if not skip_validation:
    try:
        validator = ConfigValidator(settings)
        validator.validate_or_raise()
    except ConfigValidationError as e:
        print("CONFIGURATION ERROR:")
        for error in e.errors:
            print(f"  - {error}")
        raise SystemExit("Configuration validation failed. Check MANA_* variables and .env.")
