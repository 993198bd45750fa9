"""Smooth cutoff chi and its tensor product eta."""

from dataclasses import dataclass
from math import comb
from typing import Optional

import numpy as np

from ..core.errors import ConfigurationError

SMOOTHSTEP_ORDER = 4


def smoothstep(s: np.ndarray, order: int = SMOOTHSTEP_ORDER) -> np.ndarray:
    """Generalized smoothstep of degree 2 order + 1, clamped to [0, 1].

    Derivatives up to ``order`` vanish at both ends.
    """
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    total = np.zeros_like(s)
    for n in range(order + 1):
        total += comb(order + n, n) * comb(2 * order + 1, order - n) * (-s) ** n
    return s ** (order + 1) * total


@dataclass(frozen=True)
class CutoffProfile:
    """chi = 1 on [-r, r], 0 outside [-2r, 2r], a degree-9 smoothstep in between.

    Args:
        r: Inner plateau radius
        period: Horizontal period; when set, x1 is wrapped to (-L/2, L/2] first
    """

    r: float
    period: Optional[float] = None

    def __post_init__(self):
        if self.r <= 0:
            raise ConfigurationError("Cutoff radius must be positive", {"r": self.r})
        if self.period is not None and 4 * self.r > self.period:
            raise ConfigurationError("Cutoff support exceeds the period", {"r": self.r, "period": self.period})

    def chi(self, t) -> np.ndarray:
        t = np.abs(np.asarray(t, dtype=float))
        return smoothstep((2 * self.r - t) / self.r)

    def wrap(self, x1) -> np.ndarray:
        x1 = np.asarray(x1, dtype=float)
        if self.period is None:
            return x1
        half = self.period / 2
        return np.mod(x1 + half, self.period) - half

    def eta(self, x1, xn) -> np.ndarray:
        """eta(x) = chi(x1) chi(x_n)."""
        return self.chi(self.wrap(x1)) * self.chi(xn)
