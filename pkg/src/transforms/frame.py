"""Normalized boundary frames and the solution expressed in frame coordinates."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from ..core.errors import FrameError
from ..core.fields import GridFunction
from ..core.interpolation import GridInterpolant

logger = logging.getLogger(__name__)

MAX_SHRINKS = 10
CHECK_POINTS = 9
FD_STEP = 1e-6


@dataclass
class BoundaryFrame:
    """Affine frame at a boundary point.

    Frame coordinates (xi_1, xi_n) map to x = p + alpha xi_1 t + beta xi_n nu, where t is
    the unit tangent and nu the inward normal. With alpha = u_tt(p)^(-1/2) and
    beta = |u_nu(p)|^(-1) the frame solution has u_11(0) = 1 and u_n(0) = -1, so
    (-u_n)^4 U^11 = 1 at the origin.

    Args:
        theta: Boundary parameter of p
        point: p
        tangent: Unit tangent
        normal: Unit inward normal
        alpha: Tangential scale
        beta: Normal scale
        c0: Half the smaller of min |u_n| and min u_11 over the patch
        delta: Patch radius
        lam: Constant of the equation in physical coordinates
        q: Exponent of the equation
    """

    theta: float
    point: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    alpha: float
    beta: float
    c0: float
    delta: float
    lam: float = 1.0
    q: float = 2.0

    @property
    def frame_lambda(self) -> float:
        """lam (alpha beta)^2, the constant of the equation in frame coordinates."""
        return self.lam * (self.alpha * self.beta) ** 2

    def to_physical(self, xi1, xin):
        xi1 = np.asarray(xi1, dtype=float)
        xin = np.asarray(xin, dtype=float)
        x = self.point[0] + self.alpha * xi1 * self.tangent[0] + self.beta * xin * self.normal[0]
        y = self.point[1] + self.alpha * xi1 * self.tangent[1] + self.beta * xin * self.normal[1]
        return x, y

    def to_dict(self) -> Dict:
        return {
            "theta": self.theta,
            "point": [float(v) for v in self.point],
            "tangent": [float(v) for v in self.tangent],
            "normal": [float(v) for v in self.normal],
            "alpha": self.alpha,
            "beta": self.beta,
            "c0": self.c0,
            "delta": self.delta,
            "lam": self.lam,
            "q": self.q,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "BoundaryFrame":
        return cls(
            float(data["theta"]),
            np.asarray(data["point"], dtype=float),
            np.asarray(data["tangent"], dtype=float),
            np.asarray(data["normal"], dtype=float),
            float(data["alpha"]),
            float(data["beta"]),
            float(data["c0"]),
            float(data["delta"]),
            float(data.get("lam", 1.0)),
            float(data.get("q", 2.0)),
        )


class FrameField:
    """A scalar function of frame coordinates (y1, x_n) with its normal derivative.

    Wraps either a GridFunction seen through a BoundaryFrame or a closed-form callable.
    """

    def __init__(self, func: Callable, d_n: Optional[Callable] = None, d_11: Optional[Callable] = None):
        self._func = func
        self._d_n = d_n
        self._d_11 = d_11

    def __call__(self, y1, xn) -> np.ndarray:
        return np.asarray(self._func(y1, xn), dtype=float)

    def d_n(self, y1, xn) -> np.ndarray:
        if self._d_n is not None:
            return np.asarray(self._d_n(y1, xn), dtype=float)
        xn = np.asarray(xn, dtype=float)
        return (self(y1, xn + FD_STEP) - self(y1, xn - FD_STEP)) / (2 * FD_STEP)

    def d_11(self, y1, xn) -> np.ndarray:
        if self._d_11 is not None:
            return np.asarray(self._d_11(y1, xn), dtype=float)
        y1 = np.asarray(y1, dtype=float)
        h = 1e-4
        return (self(y1 + h, xn) - 2 * self(y1, xn) + self(y1 - h, xn)) / h ** 2

    @classmethod
    def from_grid(cls, u: GridFunction, frame: BoundaryFrame, interpolant: Optional[GridInterpolant] = None) -> "FrameField":
        spline = interpolant or GridInterpolant(u)
        t, nu = frame.tangent, frame.normal

        def func(y1, xn):
            return spline(*frame.to_physical(y1, xn))

        def d_n(y1, xn):
            return frame.beta * spline.directional(*frame.to_physical(y1, xn), nu)

        def d_11(y1, xn):
            return frame.alpha ** 2 * spline.second_directional(*frame.to_physical(y1, xn), t, t)

        return cls(func, d_n, d_11)


def _check_grid(delta: float):
    y1 = np.linspace(-delta, delta, CHECK_POINTS)
    xn = np.linspace(0.0, 3.0 * delta, CHECK_POINTS)
    return np.meshgrid(y1, xn)


def boundary_frame(
    u: GridFunction,
    theta: float = 0.0,
    delta: float = 0.1,
    lam: Optional[float] = None,
    q: Optional[float] = None,
    interpolant: Optional[GridInterpolant] = None,
) -> BoundaryFrame:
    """Build the normalized frame at (a cos theta, b sin theta) and fix the patch radius.

    delta is halved (at most 10 times) until u_n < 0 and u_11 > 0 hold in frame
    coordinates on the candidate patch, which spans x_n up to 3 delta.

    Raises:
        FrameError: If u is not monotone along the normal at p, or no radius works
    """
    spline = interpolant or GridInterpolant(u)
    domain = u.domain
    p = domain.boundary_point(theta)
    t = domain.boundary_tangent(theta)
    nu = domain.inward_normal(theta)
    u_nu = float(spline.directional(p[0], p[1], nu))
    u_tt = float(spline.second_directional(p[0], p[1], t, t))
    if u_nu >= 0.0 or u_tt <= 0.0:
        raise FrameError(
            "Solution is not strictly monotone and convex at the boundary point",
            {"theta": theta, "u_nu": u_nu, "u_tt": u_tt},
        )
    lam = float(u.metadata.get("lambda", 1.0)) if lam is None else lam
    q = float(u.metadata.get("q", 2.0)) if q is None else q
    alpha = u_tt ** -0.5
    beta = 1.0 / abs(u_nu)

    for shrink in range(MAX_SHRINKS + 1):
        frame = BoundaryFrame(theta, p, t, nu, alpha, beta, 0.0, delta, lam, q)
        field = FrameField.from_grid(u, frame, spline)
        Y1, XN = _check_grid(delta)
        x, y = frame.to_physical(Y1, XN)
        X, Y = domain.to_reference(x, y)
        inside = np.hypot(X, Y) <= spline.r_max - 3 * spline.dr
        un = field.d_n(Y1, XN)
        u11 = field.d_11(Y1, XN)
        if np.all(inside) and np.all(un < 0.0) and np.all(u11 > 0.0):
            frame.c0 = 0.5 * float(min(np.min(-un), np.min(u11)))
            if shrink:
                logger.warning("Patch radius shrunk %d times to %.4g", shrink, delta)
            return frame
        delta *= 0.5
    raise FrameError("No patch radius satisfies the frame hypotheses", {"theta": theta, "delta": delta})
