"""Seeded band-limited random data that can be sampled at any resolution."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import chebyshev as C

from ..core.errors import ConfigurationError
from ..core.fields import BoundaryTrace, StripField
from .problem import GrushinProblem


@dataclass
class BandLimitedDatum:
    """A continuous random pair (f, g).

    f(x1, xn) = sum over xi <= cutoff, p <= degree of T_p(2 xn - 1) (A cos + B sin)(xi k x1) / max(1, xi)^2
    and g has the same horizontal structure without the vertical factor.
    """

    cutoff: int
    degree: int
    f_cos: np.ndarray
    f_sin: np.ndarray
    g_cos: np.ndarray
    g_sin: np.ndarray
    period: float = 2 * np.pi
    seed: Optional[int] = None

    @classmethod
    def draw(cls, seed: int, cutoff: int, degree: int = 4, period: float = 2 * np.pi) -> "BandLimitedDatum":
        if cutoff < 0 or degree < 0:
            raise ConfigurationError("Cutoff and degree must be non-negative", {"cutoff": cutoff, "degree": degree})
        rng = np.random.default_rng(seed)
        decay = 1.0 / np.maximum(1, np.arange(cutoff + 1)) ** 2
        f_cos = rng.standard_normal((cutoff + 1, degree + 1)) * decay[:, None]
        f_sin = rng.standard_normal((cutoff + 1, degree + 1)) * decay[:, None]
        f_sin[0] = 0.0
        g_cos = rng.standard_normal(cutoff + 1) * decay
        g_sin = rng.standard_normal(cutoff + 1) * decay
        g_sin[0] = 0.0
        return cls(cutoff, degree, f_cos, f_sin, g_cos, g_sin, period, seed)

    def _harmonics(self, x1: np.ndarray):
        k = 2 * np.pi / self.period * np.arange(self.cutoff + 1)
        return np.cos(np.outer(k, x1)), np.sin(np.outer(k, x1))

    def field(self, modes: int, vertical: int) -> StripField:
        """Sample f on a strip grid."""
        if 2 * self.cutoff >= modes:
            raise ConfigurationError("Grid too coarse for the datum cutoff", {"modes": modes, "cutoff": self.cutoff})
        x1 = np.arange(modes) * self.period / modes
        xn = np.linspace(0.0, 1.0, vertical + 1)
        cos, sin = self._harmonics(x1)
        cheb = C.chebvander(2 * xn - 1, self.degree)
        a = cheb @ self.f_cos.T
        b = cheb @ self.f_sin.T
        return StripField(a @ cos + b @ sin, self.period)

    def trace(self, modes: int) -> BoundaryTrace:
        x1 = np.arange(modes) * self.period / modes
        cos, sin = self._harmonics(x1)
        return BoundaryTrace(self.g_cos @ cos + self.g_sin @ sin, self.period)

    def problem(self, m: int, modes: int, vertical: int) -> GrushinProblem:
        return GrushinProblem(m, self.field(modes, vertical), self.trace(modes))


def default_cutoff(modes: int) -> int:
    """Largest cutoff whose pairwise products stay below the Nyquist mode."""
    return max(1, modes // 4 - 1)


def random_problem(
    m: int,
    modes: int,
    vertical: int,
    seed: int,
    cutoff: Optional[int] = None,
    degree: int = 4,
    period: float = 2 * np.pi,
) -> GrushinProblem:
    """Draw one band-limited problem and sample it on the given grid."""
    cutoff = default_cutoff(modes) if cutoff is None else cutoff
    return BandLimitedDatum.draw(seed, cutoff, degree, period).problem(m, modes, vertical)
