"""Partial Legendre transform in the horizontal variable, slice by slice.

Each y_n slice is conjugated with the sorted-slope algorithm: for a convex sample row the
maximizer of y z - v(y) over the piecewise-linear interpolant is the node where z crosses
the secant slopes. A local quadratic fit at that node refines the value to second order
and is exact on quadratics.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import PreconditionError, RangeError
from ..core.parallel import ordered_map
from .patch import PatchField

logger = logging.getLogger(__name__)


def secant_slopes(y: np.ndarray, values: np.ndarray) -> np.ndarray:
    return np.diff(values) / np.diff(y)


def check_convex(y: np.ndarray, values: np.ndarray, threshold: float = 0.0, row: Optional[int] = None) -> np.ndarray:
    """Second differences of a slice.

    Raises:
        PreconditionError: If a second difference is not positive or falls below threshold
    """
    h = y[1] - y[0]
    d2 = (values[2:] - 2 * values[1:-1] + values[:-2]) / h ** 2
    worst = float(np.min(d2))
    if worst <= 0.0 or worst < threshold:
        raise PreconditionError(
            "Slice is not strictly convex", {"row": row, "min_second_difference": worst, "threshold": threshold}
        )
    return d2


def conjugate_slice(
    y: np.ndarray, values: np.ndarray, z: np.ndarray, threshold: float = 0.0, row: Optional[int] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Convex conjugate sup_y (y z - v(y)) of one uniformly sampled convex slice.

    Returns:
        Tuple: (conjugate values at z, maximizers y*(z))
    """
    y = np.asarray(y, dtype=float)
    values = np.asarray(values, dtype=float)
    z = np.asarray(z, dtype=float)
    d2 = check_convex(y, values, threshold, row)
    h = y[1] - y[0]
    slopes = secant_slopes(y, values)

    i = np.clip(np.searchsorted(slopes, z), 1, len(y) - 2)
    b = (values[i + 1] - values[i - 1]) / (2 * h)
    curvature = d2[i - 1]
    y_star = y[i] + (z - b) / curvature
    step = y_star - y[i]
    local = values[i] + b * step + 0.5 * curvature * step ** 2
    return y_star * z - local, y_star


def brute_force_conjugate(y: np.ndarray, values: np.ndarray, z: np.ndarray) -> np.ndarray:
    """max_j (y_j z - v_j) over all sample nodes."""
    return np.max(np.outer(np.asarray(z, dtype=float), y) - np.asarray(values)[None, :], axis=1)


def common_coverage(y: np.ndarray, rows: Sequence[np.ndarray]) -> Tuple[float, float]:
    """Slope interval covered by every slice."""
    lo = max(float(secant_slopes(y, r)[0]) for r in rows)
    hi = min(float(secant_slopes(y, r)[-1]) for r in rows)
    return lo, hi


def _conjugate_rows(
    y: np.ndarray, rows: np.ndarray, z: np.ndarray, threshold: float, workers: int
) -> List[np.ndarray]:
    items = list(enumerate(rows))
    return ordered_map(lambda item: conjugate_slice(y, item[1], z, threshold, item[0])[0], items, workers)


def _threshold(v: PatchField) -> float:
    return 0.5 * v.frame.c0 if v.frame is not None else 0.0


def partial_legendre(
    v: PatchField,
    z_range: Optional[Tuple[float, float]] = None,
    points: Optional[int] = None,
    workers: int = 1,
) -> PatchField:
    """v*(z1, z_n) = sup over y1 of (y1 z1 - v(y1, z_n)), with z_n = y_n.

    Args:
        v: Patch field convex in y1 on every slice
        z_range: Requested z1 interval; defaults to the slope range covered by every slice
        points: Number of z1 samples, defaults to len(v.x1)
        workers: Slices conjugated concurrently

    Returns:
        PatchField: v* with kind "v*" on the same vertical axis

    Raises:
        PreconditionError: If a slice has a second difference below c0/2 (or not positive)
        RangeError: If z_range reaches outside the covered slope range
    """
    threshold = _threshold(v)
    for index, row in enumerate(v.values):
        check_convex(v.x1, row, threshold, index)
    lo, hi = common_coverage(v.x1, v.values)
    if z_range is not None:
        if z_range[0] < lo or z_range[1] > hi:
            raise RangeError(
                "Requested z1 range exceeds the slope range of the patch; shrink the patch",
                {"requested": list(z_range), "covered": [lo, hi]},
            )
        lo, hi = float(z_range[0]), float(z_range[1])
    z = np.linspace(lo, hi, points or len(v.x1))
    rows = _conjugate_rows(v.x1, v.values, z, threshold, workers)
    meta = dict(v.metadata)
    meta.update({"source_x1": v.x1.tolist(), "coverage": [lo, hi]})
    logger.debug("Partial Legendre: %d slices, z1 in [%.4g, %.4g]", len(rows), lo, hi)
    return PatchField(z, v.xn.copy(), np.vstack(rows), "v*", v.delta, v.frame, meta)


def pl_inverse(v_star: PatchField, workers: int = 1) -> PatchField:
    """Conjugate v* again per slice, returning v on the original y1 nodes inside the coverage."""
    for index, row in enumerate(v_star.values):
        check_convex(v_star.x1, row, 0.0, index)
    lo, hi = common_coverage(v_star.x1, v_star.values)
    source = v_star.metadata.get("source_x1")
    if source is not None:
        y = np.asarray(source, dtype=float)
        y = y[(y >= lo) & (y <= hi)]
    else:
        y = np.linspace(lo, hi, len(v_star.x1))
    if len(y) < 3:
        raise RangeError("Too few y1 nodes inside the slope range of v*", {"covered": [lo, hi]})
    rows = _conjugate_rows(v_star.x1, v_star.values, y, 0.0, workers)
    meta = {k: val for k, val in v_star.metadata.items() if k not in ("source_x1", "coverage")}
    return PatchField(y, v_star.xn.copy(), np.vstack(rows), "v", v_star.delta, v_star.frame, meta)
