"""Per-mode tridiagonal solves for the degenerate linear model."""

import logging
from typing import Tuple

import numpy as np

from ..core.calculus import horizontal_derivative, wavenumbers
from ..core.errors import SolverError
from ..core.fields import StripField
from ..core.parallel import ordered_map
from .problem import GrushinProblem

logger = logging.getLogger(__name__)

PIVOT_FLOOR = 1e-14


def solve_tridiagonal_batched(lower: float, diag: np.ndarray, upper: float, rhs: np.ndarray) -> np.ndarray:
    """Thomas algorithm for many systems with constant off-diagonals.

    Each column of ``diag`` / ``rhs`` is one system of size n = diag.shape[0].

    Raises:
        SolverError: If a pivot degenerates relative to its diagonal entry
    """
    n = diag.shape[0]
    b = diag.astype(float).copy()
    d = rhs.astype(complex).copy()
    for k in range(1, n):
        pivot = b[k - 1]
        if np.any(np.abs(pivot) <= PIVOT_FLOOR * np.abs(diag[k - 1])):
            raise SolverError("Degenerate pivot in tridiagonal sweep", {"row": k - 1})
        w = lower / pivot
        b[k] = b[k] - w * upper
        d[k] = d[k] - w * d[k - 1]
    if np.any(np.abs(b[-1]) <= PIVOT_FLOOR * np.abs(diag[-1])):
        raise SolverError("Degenerate pivot in tridiagonal sweep", {"row": n - 1})
    x = np.empty_like(d)
    x[-1] = d[-1] / b[-1]
    for k in range(n - 2, -1, -1):
        x[k] = (d[k] - upper * x[k + 1]) / b[k]
    return x


def _solve_columns(args) -> np.ndarray:
    lower, diag, upper, rhs = args
    return solve_tridiagonal_batched(lower, diag, upper, rhs)


def solve_grushin(p: GrushinProblem, workers: int = 1) -> StripField:
    """Solve the model problem mode by mode.

    Each horizontal mode solves w'' - xi^2 x_n^m w = f_hat on (0, 1) with w(0) = g_hat and
    w(1) = 0, using the three-point Laplacian and the coefficient evaluated at the nodes.

    Args:
        p: The problem
        workers: Number of column chunks solved concurrently

    Returns:
        StripField: The discrete solution
    """
    K = p.vertical
    h = 1.0 / K
    xn = np.linspace(0.0, 1.0, K + 1)
    xi = wavenumbers(p.modes, p.period)

    f_hat = np.fft.fft(p.f.values, axis=1)
    g_hat = np.fft.fft(p.g.values)

    diag = -2.0 / h ** 2 - (xn[1:K, None] ** p.m) * (xi[None, :] ** 2)
    rhs = f_hat[1:K].copy()
    rhs[0] -= g_hat / h ** 2

    chunks = np.array_split(np.arange(p.modes), max(1, min(workers, p.modes)))
    parts = ordered_map(
        _solve_columns,
        [(1.0 / h ** 2, diag[:, idx], 1.0 / h ** 2, rhs[:, idx]) for idx in chunks],
        workers,
    )
    w = np.zeros((K + 1, p.modes), dtype=complex)
    w[0] = g_hat
    w[1:K] = np.hstack(parts)
    u = np.fft.ifft(w, axis=1).real
    logger.debug("Solved %d modes on %d vertical intervals (m=%d)", p.modes, K, p.m)
    return StripField(u, p.period, p.f.n)


def grushin_residual(p: GrushinProblem, u: StripField) -> Tuple[float, float]:
    """Discrete residual of the full 2-D operator at interior rows.

    Returns:
        Tuple[float, float]: (max residual, residual scale)
    """
    K = p.vertical
    h = 1.0 / K
    xn = np.linspace(0.0, 1.0, K + 1)[:, None]
    v = u.values
    u11 = horizontal_derivative(v, 2, p.period)
    lap = np.zeros_like(v)
    lap[1:K] = (v[2:] - 2 * v[1:K] + v[:K - 1]) / h ** 2
    r = lap[1:K] + xn[1:K] ** p.m * u11[1:K] - p.f.values[1:K]
    xi_max = np.max(np.abs(wavenumbers(p.modes, p.period)))
    scale = (4.0 / h ** 2 + xi_max ** 2) * np.max(np.abs(v)) + np.max(np.abs(p.f.values))
    return float(np.max(np.abs(r))), float(scale)
