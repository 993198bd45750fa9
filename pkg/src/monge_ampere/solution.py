"""Solution bundle of the nonlinear solvers."""

from dataclasses import asdict, dataclass, field
from typing import Dict, List

import numpy as np

from ..core.fields import GridFunction


@dataclass
class IterationRecord:
    step: int
    residual: float
    damping: float


@dataclass
class MASolution:
    """Converged solution of det D^2 u = lam (-u)^q with u = 0 on the boundary.

    Args:
        u: Solution on the physical domain's mesh
        q: Exponent
        lam: Physical constant (the eigenvalue for eigen solves)
        residual: Discrete L-inf residual on the physical domain
        iterations: Newton (or inverse-iteration) trace
    """

    u: GridFunction
    q: float
    lam: float
    residual: float
    iterations: List[IterationRecord] = field(default_factory=list)
    mode: str = "dirichlet"

    @property
    def center_value(self) -> float:
        return self.u.center_value()

    @property
    def min_value(self) -> float:
        return float(np.min(self.u.values))

    def to_dict(self) -> Dict:
        """JSON metadata written next to the field dump."""
        return {
            "mode": self.mode,
            "q": self.q,
            "lambda": self.lam,
            "residual": self.residual,
            "iterations": [asdict(record) for record in self.iterations],
            "center_value": self.center_value,
            "domain": self.u.domain.to_dict(),
            "n_r": self.u.n_r,
            "n_theta": self.u.n_theta,
        }
