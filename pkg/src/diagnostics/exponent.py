"""Boundary expansion exponent: w(x_n) = u(0, x_n) - u(0, 0) - x_n u_n(0, 0) ~ x_n^(q+2)."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core.errors import ConfigurationError, WindowError
from ..core.fields import GridFunction
from ..core.interpolation import GridInterpolant
from ..transforms.frame import BoundaryFrame, FrameField, boundary_frame

logger = logging.getLogger(__name__)

WINDOW_POINTS = 24
MIN_WINDOW_POINTS = 20


@dataclass
class PowerLawFit:
    """log|w| = log C + gamma log s (+ beta s)."""

    gamma: float
    prefactor: float
    residual: float
    correction: float = 0.0

    def to_dict(self):
        return {"gamma": self.gamma, "prefactor": self.prefactor, "residual": self.residual, "correction": self.correction}


def fit_power_law(s: np.ndarray, w: np.ndarray, correction: int = 1) -> PowerLawFit:
    """Least squares of log|w| on [1, log s, s] (or [1, log s] with correction=0).

    Raises:
        WindowError: If w vanishes or changes sign on the samples
    """
    s = np.asarray(s, dtype=float)
    w = np.asarray(w, dtype=float)
    if len(s) < 3:
        raise ConfigurationError("Need at least 3 samples for a power-law fit", {"samples": len(s)})
    if not (np.all(w > 0.0) or np.all(w < 0.0)):
        raise WindowError("w changes sign in the fit window; shrink the window", {"min": float(w.min()), "max": float(w.max())})
    columns = [np.ones_like(s), np.log(s)]
    if correction:
        columns.append(s)
    A = np.column_stack(columns)
    b = np.log(np.abs(w))
    coef, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.max(np.abs(A @ coef - b)))
    return PowerLawFit(float(coef[1]), float(np.exp(coef[0])), residual, float(coef[2]) if correction else 0.0)


def fit_window(delta: float, points: int = WINDOW_POINTS) -> np.ndarray:
    """One decade of geometrically spaced samples ending at delta / 2."""
    if points < MIN_WINDOW_POINTS:
        raise ConfigurationError("The exponent window needs at least 20 points", {"points": points})
    return np.geomspace(delta / 20.0, delta / 2.0, points)


@dataclass
class NormalProfile:
    """u along the inward normal of a frame, in frame coordinates.

    Args:
        s: Normal coordinates of the samples
        values: u(0, s)
        origin_value: u(0, 0)
        origin_slope: u_n(0, 0) from the spline's analytic derivative
        dr: Radial spacing of the mesh the values come from
    """

    s: np.ndarray
    values: np.ndarray
    origin_value: float
    origin_slope: float
    dr: float = 0.0

    @classmethod
    def from_frame(
        cls, u: GridFunction, frame: BoundaryFrame, s: np.ndarray, interpolant: Optional[GridInterpolant] = None
    ) -> "NormalProfile":
        field = FrameField.from_grid(u, frame, interpolant)
        s = np.asarray(s, dtype=float)
        zeros = np.zeros_like(s)
        return cls(
            s,
            field(zeros, s),
            float(field(0.0, 0.0)),
            float(field.d_n(0.0, 0.0)),
            u.mesh.dr,
        )

    def value(self, s) -> np.ndarray:
        return np.interp(s, self.s, self.values)

    def slope(self) -> float:
        return self.origin_slope

    def remainder(self) -> np.ndarray:
        """w(s) = u(0, s) - u(0, 0) - s u_n(0, 0)."""
        return self.values - self.origin_value - self.s * self.origin_slope

    @staticmethod
    def richardson(coarse: "NormalProfile", fine: "NormalProfile") -> "NormalProfile":
        """Cancel the O(dr^2) error of two profiles sampled at the same s."""
        if not np.allclose(coarse.s, fine.s):
            raise ConfigurationError("Richardson extrapolation needs matching samples")
        c2, f2 = coarse.dr ** 2, fine.dr ** 2
        if c2 <= f2:
            raise ConfigurationError("Coarse profile must have the larger spacing", {"coarse": coarse.dr, "fine": fine.dr})

        def mix(a, b):
            return (c2 * b - f2 * a) / (c2 - f2)

        return NormalProfile(
            fine.s,
            mix(coarse.values, fine.values),
            float(mix(coarse.origin_value, fine.origin_value)),
            float(mix(coarse.origin_slope, fine.origin_slope)),
            0.0,
        )


def boundary_exponent_fit(
    u: GridFunction,
    frame: Optional[BoundaryFrame] = None,
    q: Optional[float] = None,
    coarse: Optional[GridFunction] = None,
    points: int = WINDOW_POINTS,
    correction: int = 1,
) -> PowerLawFit:
    """Fit the exponent of w over one decade ending at delta / 2.

    Args:
        u: Solution
        frame: Boundary frame of u (built at theta = 0 when absent)
        q: Exponent of the equation, used only for logging the expected gamma = q + 2
        coarse: Solution on a coarser mesh; when given, the two profiles are Richardson-combined
        points: Samples in the window
        correction: 1 to absorb the (1 + beta s) correction in the fit

    Raises:
        WindowError: If w changes sign in the window
    """
    frame = frame or boundary_frame(u)
    s = fit_window(frame.delta, points)
    profile = NormalProfile.from_frame(u, frame, s)
    if coarse is not None:
        coarse_frame = boundary_frame(coarse, frame.theta, frame.delta)
        profile = NormalProfile.richardson(NormalProfile.from_frame(coarse, coarse_frame, s), profile)
    fit = fit_power_law(profile.s, profile.remainder(), correction)
    if q is not None:
        logger.info("Boundary exponent %.4f (expected %.1f), prefactor %.4g", fit.gamma, q + 2, fit.prefactor)
    return fit
