"""Hodograph transform: v(y1, y_n) is the root x_n of u(y1, x_n) + y_n = 0."""

import logging
from typing import Callable, Optional, Tuple, Union

import numpy as np

from ..core.errors import ConfigurationError, FrameError, PatchRadiusError
from ..core.fields import GridFunction
from .frame import BoundaryFrame, FrameField, boundary_frame
from .patch import PatchField

logger = logging.getLogger(__name__)

BISECTION_STEPS = 60
SEARCH_FACTOR = 3.0
ROOT_SLACK = 1e-10


def solve_roots(field: FrameField, y1: np.ndarray, yn: np.ndarray, upper: float) -> np.ndarray:
    """Roots x_n in [0, upper] of field(y1, x_n) + yn = 0, by bisection and one Newton polish.

    Raises:
        PatchRadiusError: If some root lies beyond ``upper``
        FrameError: If the bracket is not a sign change (non-monotone profile)
    """
    lo = np.zeros_like(yn)
    hi = np.full_like(yn, upper)
    f_lo = field(y1, lo) + yn
    f_hi = field(y1, hi) + yn
    if np.any(f_hi > 0.0):
        raise PatchRadiusError(
            "Root lies outside the patch, shrink delta", {"upper": upper, "worst": float(np.max(f_hi))}
        )
    if np.any(f_lo < -ROOT_SLACK):
        raise FrameError("Profile is not monotone along the normal", {"worst": float(np.min(f_lo))})

    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        f_mid = field(y1, mid) + yn
        right = f_mid > 0.0
        lo = np.where(right, mid, lo)
        hi = np.where(right, hi, mid)
    x = 0.5 * (lo + hi)

    f = field(y1, x) + yn
    slope = field.d_n(y1, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        polished = x - f / slope
    ok = np.isfinite(polished) & (polished >= 0.0) & (polished <= upper)
    f_new = field(y1, np.where(ok, polished, x)) + yn
    better = ok & (np.abs(f_new) < np.abs(f))
    return np.where(better, polished, x)


def patch_axes(delta: float, points: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
    """Uniform y1 in [-delta, delta] and y_n in [0, delta], boundary row included."""
    n1, nn = points
    if n1 < 5 or nn < 3:
        raise ConfigurationError("Patch needs at least 5 x 3 points", {"points": list(points)})
    return np.linspace(-delta, delta, n1), np.linspace(0.0, delta, nn)


def hodograph_forward(
    u: Union[GridFunction, Callable],
    frame: Optional[BoundaryFrame] = None,
    delta: Optional[float] = None,
    points: Tuple[int, int] = (33, 17),
    theta: float = 0.0,
) -> PatchField:
    """Hodograph transform of u on the patch of radius delta.

    Args:
        u: GridFunction (seen through ``frame``) or a callable u(y1, x_n) already in frame coordinates
        frame: Boundary frame; built at ``theta`` when u is a GridFunction and frame is None
        delta: Patch radius, defaults to the frame's
        points: (horizontal, vertical) patch sample counts
        theta: Boundary parameter used when the frame is built here

    Returns:
        PatchField: v with kind "v"; metadata holds the defining-identity residual
    """
    if isinstance(u, GridFunction):
        if frame is None:
            frame = boundary_frame(u, theta, delta if delta is not None else 0.1)
        field = FrameField.from_grid(u, frame)
        delta = frame.delta if delta is None else delta
    else:
        if delta is None:
            raise ConfigurationError("A patch radius is required for closed-form inputs")
        field = u if isinstance(u, FrameField) else FrameField(u)

    y1_axis, yn_axis = patch_axes(delta, points)
    Y1, YN = np.meshgrid(y1_axis, yn_axis)
    V = solve_roots(field, Y1, YN, SEARCH_FACTOR * delta)
    identity = float(np.max(np.abs(field(Y1, V) + YN)))
    logger.info("Hodograph on %dx%d patch, delta=%.4g, identity residual %.3e", points[0], points[1], delta, identity)
    return PatchField(y1_axis, yn_axis, V, "v", float(delta), frame, {"identity_residual": identity})
