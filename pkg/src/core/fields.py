"""Field containers: strip fields, their spectra, boundary traces and polar grid functions."""

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, Optional

import numpy as np

from .domain import Domain2D
from .errors import ConfigurationError, DomainError


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass
class StripField:
    """Real field on the periodic strip [0, L) x [0, 1].

    Args:
        values: (K+1) x M array, vertical index outer
        period: Horizontal period L
        n: Ambient dimension carried for later extension
    """

    values: np.ndarray
    period: float = 2 * np.pi
    n: int = 2

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[0] < 3 or self.values.shape[1] < 2:
            raise ConfigurationError("Strip values must be a (K+1) x M array", {"shape": self.values.shape})
        if not np.all(np.isfinite(self.values)):
            raise DomainError("Strip field has non-finite values")
        if self.period <= 0:
            raise ConfigurationError("Period must be positive", {"period": self.period})

    @property
    def modes(self) -> int:
        return self.values.shape[1]

    @property
    def vertical(self) -> int:
        """K, the number of vertical intervals."""
        return self.values.shape[0] - 1

    @property
    def h(self) -> float:
        return 1.0 / self.vertical

    @property
    def x1(self) -> np.ndarray:
        return np.arange(self.modes) * self.period / self.modes

    @property
    def xn(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.vertical + 1)

    def mesh(self):
        """Return (X1, XN) coordinate arrays shaped like values."""
        return np.meshgrid(self.x1, self.xn)

    @classmethod
    def from_function(cls, func, modes: int, vertical: int, period: float = 2 * np.pi) -> "StripField":
        """Sample func(x1, xn) on the strip grid."""
        x1 = np.arange(modes) * period / modes
        xn = np.linspace(0.0, 1.0, vertical + 1)
        X1, XN = np.meshgrid(x1, xn)
        return cls(np.broadcast_to(func(X1, XN), X1.shape).copy(), period)

    @classmethod
    def zeros_like(cls, other: "StripField") -> "StripField":
        return cls(np.zeros_like(other.values), other.period, other.n)

    def with_values(self, values: np.ndarray) -> "StripField":
        return StripField(values, self.period, self.n)

    def trace(self, row: int = 0) -> "BoundaryTrace":
        return BoundaryTrace(self.values[row].copy(), self.period)

    def same_grid(self, other: "StripField") -> bool:
        return self.values.shape == other.values.shape and self.period == other.period

    def __add__(self, other: "StripField") -> "StripField":
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "StripField") -> "StripField":
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar: float) -> "StripField":
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__


@dataclass
class SpectralStripField:
    """Per-frequency coefficient columns of a StripField.

    ``coefficients[i, j]`` is the coefficient of frequency ``wavenumbers[j]`` on row i, in
    numpy FFT order, normalized by 1/M.
    """

    coefficients: np.ndarray
    period: float = 2 * np.pi

    @property
    def modes(self) -> int:
        return self.coefficients.shape[1]

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Frequencies xi scaled by 2 pi / L."""
        return np.fft.fftfreq(self.modes, d=1.0 / self.modes) * (2 * np.pi / self.period)

    @property
    def integer_modes(self) -> np.ndarray:
        return np.fft.fftfreq(self.modes, d=1.0 / self.modes).astype(int)


@dataclass
class BoundaryTrace:
    """Samples of g(x') on the horizontal torus."""

    values: np.ndarray
    period: float = 2 * np.pi

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ConfigurationError("Trace values must be one-dimensional")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("Trace has non-finite values")

    @property
    def modes(self) -> int:
        return self.values.shape[0]

    @property
    def x1(self) -> np.ndarray:
        return np.arange(self.modes) * self.period / self.modes

    @classmethod
    def from_function(cls, func, modes: int, period: float = 2 * np.pi) -> "BoundaryTrace":
        x1 = np.arange(modes) * period / modes
        return cls(np.broadcast_to(func(x1), x1.shape).copy(), period)

    def __add__(self, other: "BoundaryTrace") -> "BoundaryTrace":
        return BoundaryTrace(self.values + other.values, self.period)

    def __mul__(self, scalar: float) -> "BoundaryTrace":
        return BoundaryTrace(self.values * scalar, self.period)

    __rmul__ = __mul__


@dataclass
class GridFunction:
    """Scalar field on the fitted polar mesh of a disc or ellipse.

    Row i is the ring r_i = (i + 1/2) dr of the reference disc, the last row is the
    boundary ring. Column j is the angle 2 pi j / N_theta.
    """

    domain: Domain2D
    values: np.ndarray
    metadata: Dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ConfigurationError("Grid values must be N_r x N_theta")
        n_r, n_theta = self.values.shape
        if n_r < 8 or n_theta < 8 or n_theta % 2:
            raise ConfigurationError(
                "Need N_r >= 8 and an even N_theta >= 8", {"n_r": n_r, "n_theta": n_theta}
            )
        if not np.all(np.isfinite(self.values)):
            raise DomainError("Grid function has non-finite values")

    @property
    def n_r(self) -> int:
        return self.values.shape[0]

    @property
    def n_theta(self) -> int:
        return self.values.shape[1]

    @property
    def mesh(self):
        from .polar import PolarMesh

        return PolarMesh.create(self.n_r, self.n_theta)

    def coordinates(self):
        """Physical (x, y) of every node."""
        mesh = self.mesh
        return self.domain.from_reference(mesh.X, mesh.Y)

    def with_values(self, values: np.ndarray, **metadata) -> "GridFunction":
        merged = dict(self.metadata)
        merged.update(metadata)
        return replace(self, values=np.asarray(values, dtype=float), metadata=merged)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def center_value(self) -> float:
        """Extrapolated value at the centre from the two innermost rings."""
        return float(np.mean(9.0 * self.values[0] - self.values[1]) / 8.0)

    @classmethod
    def from_function(cls, domain: Domain2D, n_r: int, n_theta: int, func) -> "GridFunction":
        """Sample func(x, y) at the physical mesh nodes."""
        from .polar import PolarMesh

        mesh = PolarMesh.create(n_r, n_theta)
        x, y = domain.from_reference(mesh.X, mesh.Y)
        return cls(domain, np.broadcast_to(func(x, y), x.shape).copy())
