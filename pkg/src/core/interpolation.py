"""Smooth evaluation of grid functions away from the mesh nodes."""

from typing import Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.interpolate import RectBivariateSpline

from .fields import GridFunction

MIRROR_RINGS = 3
GHOST_RINGS = 6
THETA_PAD = 6


class GridInterpolant:
    """Quintic tensor spline of a GridFunction in reference polar coordinates.

    The spline sees mirrored rings through the centre, periodic angular padding and
    GHOST_RINGS polynomially extrapolated rings past the boundary, so it can be
    evaluated slightly outside the domain (needed by root brackets at the boundary).

    Args:
        u: The grid function to interpolate
    """

    def __init__(self, u: GridFunction):
        self.domain = u.domain
        mesh = u.mesh
        self.dr = mesh.dr
        values = u.values
        half = u.n_theta // 2

        inner_r = -mesh.r[MIRROR_RINGS - 1::-1]
        inner_v = np.array([np.roll(values[k], -half) for k in range(MIRROR_RINGS - 1, -1, -1)])

        steps = np.arange(-5.0, 1.0)
        coef = P.polyfit(steps, values[-6:], 5)
        ghost_steps = np.arange(1.0, GHOST_RINGS + 1)
        ghost_r = 1.0 + mesh.dr * ghost_steps
        ghost_v = P.polyval(ghost_steps, coef).T

        r_ext = np.concatenate([inner_r, mesh.r, ghost_r])
        v_ext = np.vstack([inner_v, values, ghost_v])

        theta = mesh.theta
        t_ext = np.concatenate([theta[-THETA_PAD:] - 2 * np.pi, theta, theta[:THETA_PAD] + 2 * np.pi])
        v_ext = np.hstack([v_ext[:, -THETA_PAD:], v_ext, v_ext[:, :THETA_PAD]])

        self.r_max = float(r_ext[-1])
        self._spline = RectBivariateSpline(r_ext, t_ext, v_ext, kx=5, ky=5, s=0)

    def _polar(self, x, y) -> Tuple[np.ndarray, np.ndarray]:
        X, Y = self.domain.to_reference(x, y)
        r = np.hypot(X, Y)
        theta = np.mod(np.arctan2(Y, X), 2 * np.pi)
        return r, theta

    def __call__(self, x, y) -> np.ndarray:
        r, theta = self._polar(x, y)
        return self._spline.ev(r, theta)

    def gradient(self, x, y) -> Tuple[np.ndarray, np.ndarray]:
        """Physical gradient from the analytic spline derivatives."""
        r, theta = self._polar(x, y)
        w_r = self._spline.ev(r, theta, dx=1)
        w_t = self._spline.ev(r, theta, dy=1)
        c, s = np.cos(theta), np.sin(theta)
        w_x = w_r * c - w_t * s / r
        w_y = w_r * s + w_t * c / r
        return w_x / self.domain.a, w_y / self.domain.b

    def directional(self, x, y, direction: np.ndarray) -> np.ndarray:
        gx, gy = self.gradient(x, y)
        return gx * direction[0] + gy * direction[1]

    def second_directional(self, x, y, e: np.ndarray, f: np.ndarray, step: float = 1e-5) -> np.ndarray:
        """D^2 u (e, f) by central differences of the analytic gradient."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        plus = self.directional(x + step * f[0], y + step * f[1], e)
        minus = self.directional(x - step * f[0], y - step * f[1], e)
        return (plus - minus) / (2 * step)
