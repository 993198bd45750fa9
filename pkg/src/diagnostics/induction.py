"""Growth of cut-off horizontal derivatives and the two-constant factorial envelope."""

import logging
from dataclasses import dataclass
from math import factorial, lgamma
from typing import Dict, List, Union

import numpy as np

from ..core.calculus import StripCalculus, horizontal_derivative
from ..core.errors import ConfigurationError, DifferentiationError, PreconditionError
from ..core.fields import StripField
from ..core.parallel import ordered_map
from ..grushin.norms import weighted_norm_values
from ..transforms.patch import PatchField
from .cutoff import CutoffProfile

logger = logging.getLogger(__name__)

MAX_ORDER = 12
BASE_ORDER = 4
STRIP_DEGREE = 24
PATCH_DEGREE = 16
BOUND_SLACK = 1e-12


def _excess(N: int, i: int = 0) -> int:
    return max(N - BASE_ORDER - i, 0)


@dataclass
class GrowthFit:
    """s_N <= A0 A1^((N-4)+) ((N-4-i)+)! fitted on i = 0.

    Args:
        n_max: Largest order computed
        norms: s_2 .. s_{n_max}
        A0: Constant covering the orders up to 4
        A1: Geometric growth beyond order 4
        residual: Largest log gap between bound and data
    """

    n_max: int
    norms: List[float]
    A0: float
    A1: float
    residual: float

    def __post_init__(self):
        if self.A0 < 0 or self.A1 <= 0:
            raise ConfigurationError("Growth constants must be positive", {"A0": self.A0, "A1": self.A1})

    @property
    def orders(self) -> List[int]:
        return list(range(2, self.n_max + 1))

    def bound(self, N: int, i: int = 0) -> float:
        return self.A0 * self.A1 ** _excess(N) * factorial(_excess(N, i))

    def satisfied(self, i: int = 0) -> bool:
        return all(s <= self.bound(N, i) * (1 + BOUND_SLACK) for N, s in zip(self.orders, self.norms))

    def rows(self) -> List[List]:
        """Rows 'N,s_N,bound_N'."""
        return [[N, s, self.bound(N)] for N, s in zip(self.orders, self.norms)]

    def to_dict(self) -> Dict:
        return {"n_max": self.n_max, "norms": self.norms, "A0": self.A0, "A1": self.A1, "residual": self.residual}


def fit_growth(norms: List[float], n_max: int) -> GrowthFit:
    """Tightest log-domain envelope: A0 from N <= 4, then the least A1 covering every N."""
    orders = np.arange(2, n_max + 1)
    s = np.asarray(norms, dtype=float)
    positive = s > 0.0
    if not np.any(positive):
        return GrowthFit(n_max, list(map(float, s)), 0.0, 1.0, 0.0)

    N = orders[positive]
    b = np.log(s[positive])
    t = np.array([_excess(n) for n in N], dtype=float)
    f = np.array([lgamma(_excess(n) + 1) for n in N])
    low = t == 0
    if np.any(low):
        a = float(np.max(b[low]))
        high = ~low
        log_a1 = float(np.max((b[high] - f[high] - a) / t[high])) if np.any(high) else 0.0
    else:
        log_a1 = 0.0
        a = float(np.max(b - f))
    gap = a + log_a1 * t + f - b
    return GrowthFit(n_max, list(map(float, s)), float(np.exp(a)), float(np.exp(log_a1)), float(np.max(gap)))


def _cutoff_grid(u: Union[StripField, PatchField], eta: CutoffProfile) -> np.ndarray:
    X1, XN = np.meshgrid(u.x1, u.xn)
    return eta.eta(X1, XN)


def _horizontal(u: Union[StripField, PatchField], order: int, degree: int) -> np.ndarray:
    if isinstance(u, StripField):
        return horizontal_derivative(u.values, order, u.period)
    return u.calculus(degree).derivative(u.values, (order, 0))


def _calculus(u: Union[StripField, PatchField], degree: int):
    if isinstance(u, StripField):
        return StripCalculus(u.values.shape, u.period, "chebyshev", degree)
    return u.calculus(degree)


def induction_constants(
    u: Union[StripField, PatchField],
    k: int,
    n_max: int,
    eta: CutoffProfile,
    m: int,
    workers: int = 1,
    degree: int = 0,
) -> GrowthFit:
    """Fit s_N = ||eta^(N-2) d1^N u|| in the weighted norm of order k, for 2 <= N <= n_max.

    Args:
        u: Strip or patch field
        k: Differentiability index of the weighted norm
        n_max: Largest derivative order, at most 12
        eta: Cutoff profile
        m: Degeneracy exponent
        workers: Orders evaluated concurrently
        degree: Chebyshev fit degree (24 on strips, 16 on patches when 0)

    Returns:
        GrowthFit: The norms, the constants and the largest log gap

    Raises:
        PreconditionError: If n_max lies outside [2, 12]
        DifferentiationError: If some s_N is not finite
    """
    if not 2 <= n_max <= MAX_ORDER:
        raise PreconditionError("Derivative order must lie in [2, 12]", {"n_max": n_max})
    degree = degree or (STRIP_DEGREE if isinstance(u, StripField) else PATCH_DEGREE)
    cut = _cutoff_grid(u, eta)
    calc = _calculus(u, degree)

    def one(N: int) -> float:
        values = cut ** (N - 2) * _horizontal(u, N, degree)
        return weighted_norm_values(values, calc, k, m).total

    norms = ordered_map(one, range(2, n_max + 1), workers)
    bad = [N for N, s in zip(range(2, n_max + 1), norms) if not np.isfinite(s)]
    if bad:
        raise DifferentiationError("Non-finite derivative norms", {"orders": bad})
    fit = fit_growth(norms, n_max)
    logger.info("Induction fit up to N=%d: A0=%.4g A1=%.4g, max log gap %.3f", n_max, fit.A0, fit.A1, fit.residual)
    return fit
