from dataclasses import dataclass
from typing import Optional

COMMANDS = ('mana', 'harvest', 'sweep', 'optimize', 'verify')


@dataclass
class RunConfig:
    """Settings merged with the flags of one CLI invocation.

    omega_sigma, when given, replaces omega by omega_sigma / sigma_t.
    """
    command: str
    coupling: float
    omega: float
    sigma_t: float
    method: str
    eps_k_min: int
    eps_k_max: int
    tol: float
    workers: int
    format: str = 'json'
    output: Optional[str] = None
    state_file: Optional[str] = None
    x_min: float = 0.0
    x_max: float = 5.0
    steps: int = 101

    @classmethod
    def from_args(cls, args, settings) -> "RunConfig":
        def pick(name, default):
            value = getattr(args, name, None)
            return default if value is None else value

        sigma_t = pick('sigma_t', settings.sigma_t)
        omega = pick('omega', settings.omega)
        omega_sigma = getattr(args, 'omega_sigma', None)
        if omega_sigma is not None:
            omega = omega_sigma / sigma_t

        eps_k_min, eps_k_max = settings.eps_k_min, settings.eps_k_max
        eps_levels = getattr(args, 'eps_levels', None)
        if eps_levels:
            eps_k_min, eps_k_max = eps_levels

        command = args.command
        default_format = 'csv' if command == 'sweep' else 'json'
        return cls(
            command=command,
            coupling=pick('coupling', settings.coupling),
            omega=omega,
            sigma_t=sigma_t,
            method=pick('method', settings.method),
            eps_k_min=eps_k_min,
            eps_k_max=eps_k_max,
            tol=pick('tol', settings.quad_abs_tol),
            workers=pick('workers', settings.sweep_workers),
            format=pick('format', default_format),
            output=getattr(args, 'output', None),
            state_file=getattr(args, 'state_file', None),
            x_min=pick('x_min', 0.0),
            x_max=pick('x_max', 5.0),
            steps=pick('steps', 101),
        )

    def to_dict(self):
        return {
            "command": self.command,
            "coupling": self.coupling,
            "omega": self.omega,
            "sigma_t": self.sigma_t,
            "method": self.method,
            "eps_levels": [self.eps_k_min, self.eps_k_max],
            "tol": self.tol,
            "workers": self.workers,
            "format": self.format,
            "output": self.output,
        }


def parse_eps_levels(text: str):
    """'K_MIN:K_MAX' -> (k_min, k_max)."""
    try:
        low, high = (int(part) for part in str(text).split(':'))
    except ValueError:
        raise ValueError(f"--eps-levels expects K_MIN:K_MAX, got '{text}'") from None
    return low, high
