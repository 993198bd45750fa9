"""Problem definition for the degenerate linear model."""

from dataclasses import dataclass

from ..core.errors import ConfigurationError
from ..core.fields import BoundaryTrace, StripField


@dataclass
class GrushinProblem:
    """u_nn + x_n^m u_11 = f on the strip, u = g at x_n = 0 and u = 0 at x_n = 1.

    Args:
        m: Degeneracy exponent, m >= 1
        f: Right-hand side
        g: Bottom boundary data
    """

    m: int
    f: StripField
    g: BoundaryTrace

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ConfigurationError("Degeneracy exponent must be a positive integer", {"m": self.m})
        self.m = int(self.m)
        if self.f.modes != self.g.modes or self.f.period != self.g.period:
            raise ConfigurationError(
                "f and g must share the horizontal grid",
                {"f_modes": self.f.modes, "g_modes": self.g.modes},
            )

    @property
    def modes(self) -> int:
        return self.f.modes

    @property
    def vertical(self) -> int:
        return self.f.vertical

    @property
    def period(self) -> float:
        return self.f.period

    def combine(self, a: float, other: "GrushinProblem", b: float) -> "GrushinProblem":
        """The problem with data a * self + b * other."""
        return GrushinProblem(self.m, self.f * a + other.f * b, self.g * a + other.g * b)

    def is_zero(self) -> bool:
        return not (self.f.values.any() or self.g.values.any())
