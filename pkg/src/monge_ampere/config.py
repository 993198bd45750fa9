"""Solver knobs for the Newton iteration and the logarithmic flow."""

from dataclasses import asdict, dataclass
from typing import Dict

from ..core.errors import ConfigurationError

FLOW_SCHEMES = ("explicit", "linearly-implicit")


@dataclass
class NewtonConfig:
    """Newton iteration settings.

    Args:
        tol: Residual target, relative to max(1, ||lam (-u)^q||_inf)
        max_iter: Iteration cap
        damping: Backtracking factor for the line search
        armijo: Sufficient-decrease constant
        max_halvings: Backtracking steps before the step is declared failed
    """

    tol: float = 1e-10
    max_iter: int = 60
    damping: float = 0.5
    armijo: float = 1e-4
    max_halvings: int = 30

    def __post_init__(self):
        if self.tol <= 0:
            raise ConfigurationError("Newton tolerance must be positive", {"tol": self.tol})
        if self.max_iter < 1:
            raise ConfigurationError("max_iter must be at least 1", {"max_iter": self.max_iter})
        if not 0.0 < self.damping < 1.0:
            raise ConfigurationError("Damping factor must lie in (0, 1)", {"damping": self.damping})

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass
class FlowConfig:
    """Time stepping for u_t = ln det D^2 u - q ln(-u) - ln lam.

    Args:
        dt: Time step
        steps: Maximal number of steps
        residual_stop: Stop once the sup of the right-hand side drops below this
        scheme: "linearly-implicit" Euler, or "explicit" Euler (stable only for dt of order dr^2)
        max_halvings: dt halvings allowed within one step
    """

    dt: float = 1.0
    steps: int = 1000
    residual_stop: float = 1e-6
    scheme: str = "linearly-implicit"
    max_halvings: int = 20

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigurationError("Flow time step must be positive", {"dt": self.dt})
        if self.steps < 0:
            raise ConfigurationError("Step count must be non-negative", {"steps": self.steps})
        if self.scheme not in FLOW_SCHEMES:
            raise ConfigurationError(f"Unknown flow scheme '{self.scheme}'", {"scheme": self.scheme})

    def to_dict(self) -> Dict:
        return asdict(self)
