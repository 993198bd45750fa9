"""The six-term weighted Sobolev norm of the linear model."""

from dataclasses import asdict, dataclass
from typing import Dict

import numpy as np

from ..core.calculus import StripCalculus, multi_indices
from ..core.errors import ConfigurationError, UnsupportedOrderError
from ..core.fields import StripField

COMPONENTS = (
    "second_vertical",
    "weighted_top",
    "first_vertical",
    "weighted_horizontal",
    "trace",
    "base",
)


@dataclass(frozen=True)
class WeightedNormReport:
    """Component norms of the weighted space and their sum."""

    second_vertical: float
    weighted_top: float
    first_vertical: float
    weighted_horizontal: float
    trace: float
    base: float
    k: int
    m: int

    @property
    def components(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in COMPONENTS}

    @property
    def total(self) -> float:
        return float(sum(self.components.values()))

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["total"] = self.total
        return data


def calculus_for(u, vertical: str = "fd"):
    """Pick the calculus matching a field type."""
    if isinstance(u, StripField):
        return StripCalculus(u.values.shape, u.period, vertical)
    if hasattr(u, "calculus"):
        return u.calculus()
    raise ConfigurationError(f"No calculus for {type(u).__name__}")


def weighted_norm_values(values: np.ndarray, calc, k: int, m: int) -> WeightedNormReport:
    """Evaluate the weighted norm of raw values with a given calculus."""
    if k < 0 or m < 1:
        raise ConfigurationError("Need k >= 0 and m >= 1", {"k": k, "m": m})
    if k + 2 > calc.max_vertical_order:
        raise UnsupportedOrderError(
            "Vertical order k + 2 exceeds the available stencils",
            {"k": k, "max_vertical_order": calc.max_vertical_order},
        )
    xn = calc.xn
    d = calc.derivative

    second = sum(calc.l2(d(values, (a1, an + 2))) for a1, an in multi_indices(k))
    top = sum(calc.l2(xn ** m * d(values, alpha)) for alpha in multi_indices(k + 2) if alpha[1] <= 1)
    first = sum(calc.l2(d(values, (a1, an + 1))) for a1, an in multi_indices(k))
    horizontal = calc.l2(xn ** (m - 1) * d(values, (k + 1, 0)))
    trace = calc.trace_norm(d(values, (0, 1))[0], k)
    base = calc.sobolev(values, k)
    return WeightedNormReport(
        float(second), float(top), float(first), float(horizontal), float(trace), float(base), k, m
    )


def weighted_norm(u, k: int, m: int, vertical: str = "fd") -> WeightedNormReport:
    """Weighted Sobolev norm of a strip (or patch) field.

    Args:
        u: StripField, or any field exposing ``calculus()``
        k: Differentiability index
        m: Degeneracy exponent
        vertical: Vertical backend for strip fields ("fd" supports k <= 2)

    Returns:
        WeightedNormReport: The six components and total

    Raises:
        UnsupportedOrderError: If the backend cannot reach vertical order k + 2
    """
    return weighted_norm_values(u.values, calculus_for(u, vertical), k, m)
