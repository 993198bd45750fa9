"""Hybrid spectral / finite-difference calculus and discrete Sobolev norms.

Horizontal derivatives are spectral on the torus. Vertical derivatives use either
second-order Fornberg stencils ("fd", orders up to 4) or differentiation of a
least-squares Chebyshev fit ("chebyshev"), which is what the high-order diagnostics use.
"""

import itertools
from functools import lru_cache
from typing import List, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy import sparse

from .errors import ConfigurationError, UnsupportedOrderError
from .fields import BoundaryTrace, SpectralStripField, StripField, is_power_of_two

MAX_FD_ORDER = 4
DEFAULT_CHEB_DEGREE = 24
VERTICAL_BACKENDS = ("fd", "chebyshev")


def dft_horizontal(field: StripField) -> SpectralStripField:
    """Forward DFT along x', normalized by 1/M.

    Raises:
        ConfigurationError: If M is not a power of two
    """
    if not is_power_of_two(field.modes):
        raise ConfigurationError("Horizontal sample count must be a power of two", {"modes": field.modes})
    coefficients = np.fft.fft(field.values, axis=1) / field.modes
    return SpectralStripField(coefficients, field.period)


def idft_horizontal(spectrum: SpectralStripField) -> StripField:
    values = np.fft.ifft(spectrum.coefficients * spectrum.modes, axis=1).real
    return StripField(values, spectrum.period)


def wavenumbers(modes: int, period: float) -> np.ndarray:
    return np.fft.fftfreq(modes, d=1.0 / modes) * (2 * np.pi / period)


def horizontal_derivative(values: np.ndarray, order: int, period: float) -> np.ndarray:
    """Spectral derivative along axis 1 (the periodic direction)."""
    if order == 0:
        return values
    modes = values.shape[1]
    xi = wavenumbers(modes, period)
    symbol = (1j * xi) ** order
    if order % 2 and modes % 2 == 0:
        symbol[modes // 2] = 0.0
    return np.fft.ifft(np.fft.fft(values, axis=1) * symbol, axis=1).real


def fornberg_weights(z: float, x: np.ndarray, m: int) -> np.ndarray:
    """Finite-difference weights at z on nodes x for derivatives 0..m.

    Returns:
        np.ndarray: Array c with c[j, k] the weight of node j for derivative k
    """
    n = len(x)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


@lru_cache(maxsize=64)
def vertical_fd_matrix(intervals: int, order: int) -> sparse.csr_matrix:
    """Second-order derivative matrix on the uniform grid of [0, 1].

    Centered stencils in the interior, one-sided stencils of width order + 2 at the ends.
    """
    if order > MAX_FD_ORDER:
        raise UnsupportedOrderError(
            f"Vertical order {order} exceeds the stencil limit {MAX_FD_ORDER}", {"order": order}
        )
    n = intervals + 1
    if order == 0:
        return sparse.identity(n, format="csr")
    width = order + 2
    if n < width:
        raise ConfigurationError("Too few vertical points for the stencil", {"points": n, "order": order})
    half = (order + 1) // 2
    rows: List[int] = []
    cols: List[int] = []
    vals: List[float] = []
    for i in range(n):
        if i - half >= 0 and i + half <= intervals:
            idx = np.arange(i - half, i + half + 1)
        else:
            start = 0 if i - half < 0 else n - width
            idx = np.arange(start, start + width)
        weights = fornberg_weights(float(i), idx.astype(float), order)[:, order]
        rows.extend([i] * len(idx))
        cols.extend(idx.tolist())
        vals.extend(weights.tolist())
    matrix = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return matrix * float(intervals) ** order


def chebyshev_derivative(
    values: np.ndarray,
    coords: np.ndarray,
    order: int,
    axis: int = 0,
    degree: int = DEFAULT_CHEB_DEGREE,
) -> np.ndarray:
    """Differentiate along one axis through a least-squares Chebyshev fit."""
    if order == 0:
        return values
    lo, hi = float(coords[0]), float(coords[-1])
    t = 2.0 * (coords - lo) / (hi - lo) - 1.0
    moved = np.moveaxis(values, axis, 0)
    shape = moved.shape
    flat = moved.reshape(shape[0], -1)
    deg = min(degree, shape[0] - 1)
    coef = C.chebfit(t, flat, deg)
    dcoef = C.chebder(coef, m=order, scl=2.0 / (hi - lo), axis=0)
    if dcoef.shape[0] == 0:
        return np.zeros_like(values)
    result = C.chebval(t, dcoef).T.reshape(shape)
    return np.moveaxis(result, 0, axis)


def vertical_derivative(values: np.ndarray, order: int, vertical: str = "fd", degree: int = DEFAULT_CHEB_DEGREE) -> np.ndarray:
    """Derivative along axis 0 of a strip array on the uniform grid of [0, 1]."""
    if order == 0:
        return values
    if vertical == "fd":
        return vertical_fd_matrix(values.shape[0] - 1, order) @ values
    if vertical == "chebyshev":
        xn = np.linspace(0.0, 1.0, values.shape[0])
        return chebyshev_derivative(values, xn, order, axis=0, degree=degree)
    raise ConfigurationError(f"Unknown vertical backend '{vertical}'", {"vertical": vertical})


def multi_indices(order: int, n: int = 2) -> List[Tuple[int, ...]]:
    """All multi-indices of length n with |alpha| = order, vertical index last."""
    return [alpha for alpha in itertools.product(range(order + 1), repeat=n) if sum(alpha) == order]


def differentiate(field: StripField, alpha: Sequence[int], vertical: str = "fd") -> StripField:
    """Apply d^alpha with alpha = (alpha_1, alpha_n).

    Raises:
        UnsupportedOrderError: If alpha_n > 4 with the fd backend
    """
    if len(alpha) != 2:
        raise ConfigurationError("Strip fields carry one horizontal variable", {"alpha": list(alpha)})
    a1, an = int(alpha[0]), int(alpha[1])
    out = horizontal_derivative(field.values, a1, field.period)
    out = vertical_derivative(out, an, vertical)
    return field.with_values(np.array(out, dtype=float))


def quadrature_weights(points: int, spacing: float) -> np.ndarray:
    """Simpson weights for an odd number of points, trapezoid otherwise."""
    w = np.full(points, spacing)
    if points % 2 == 1 and points >= 3:
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        w[0] = w[-1] = 1.0
        return w * spacing / 3.0
    w[0] = w[-1] = spacing / 2.0
    return w


def l2_norm_values(values: np.ndarray, period: float) -> float:
    wv = quadrature_weights(values.shape[0], 1.0 / (values.shape[0] - 1))
    wh = period / values.shape[1]
    return float(np.sqrt(np.sum(wv[:, None] * wh * values ** 2)))


def l2_norm(field: StripField) -> float:
    return l2_norm_values(field.values, field.period)


def trace_sobolev_values(values: np.ndarray, s: int, period: float) -> float:
    """||(1+xi^2)^(s/2) g_hat||, scaled so s = 0 is the L2 norm on the torus."""
    coef = np.fft.fft(values) / values.shape[0]
    xi = wavenumbers(values.shape[0], period)
    return float(np.sqrt(period * np.sum((1.0 + xi ** 2) ** s * np.abs(coef) ** 2)))


def sobolev_norm(field: Union[StripField, BoundaryTrace], s: int, vertical: str = "fd") -> float:
    """Discrete H^s norm.

    Traces use the Fourier multiplier definition. Strip fields use the sum of the L2 norms
    of every d^alpha with |alpha| <= s.

    Args:
        field: StripField or BoundaryTrace
        s: Order, 0 <= s <= 6
        vertical: Vertical backend for strip fields

    Returns:
        float: The norm
    """
    if s < 0 or s > 6:
        raise ConfigurationError("Sobolev order must lie in [0, 6]", {"s": s})
    if isinstance(field, BoundaryTrace):
        return trace_sobolev_values(field.values, s, field.period)
    calc = StripCalculus(field.values.shape, field.period, vertical)
    return calc.sobolev(field.values, s)


class StripCalculus:
    """Derivatives and norms on a strip grid with a chosen vertical backend."""

    def __init__(self, shape: Tuple[int, int], period: float, vertical: str = "fd", degree: int = DEFAULT_CHEB_DEGREE):
        if vertical not in VERTICAL_BACKENDS:
            raise ConfigurationError(f"Unknown vertical backend '{vertical}'", {"vertical": vertical})
        self.shape = shape
        self.period = period
        self.vertical = vertical
        self.degree = degree
        self.xn = np.linspace(0.0, 1.0, shape[0])[:, None]

    @property
    def max_vertical_order(self) -> int:
        return MAX_FD_ORDER if self.vertical == "fd" else self.shape[0] - 1

    def derivative(self, values: np.ndarray, alpha: Sequence[int]) -> np.ndarray:
        out = horizontal_derivative(values, int(alpha[0]), self.period)
        return vertical_derivative(out, int(alpha[1]), self.vertical, self.degree)

    def l2(self, values: np.ndarray) -> float:
        return l2_norm_values(values, self.period)

    def trace_norm(self, row: np.ndarray, s: int) -> float:
        return trace_sobolev_values(row, s, self.period)

    def sobolev(self, values: np.ndarray, s: int) -> float:
        total = 0.0
        for order in range(s + 1):
            for alpha in multi_indices(order):
                total += self.l2(self.derivative(values, alpha))
        return total


class PatchCalculus:
    """Chebyshev calculus on a non-periodic rectangular patch.

    Args:
        x1: Uniform horizontal axis
        xn: Uniform vertical axis starting at 0
        degree: Maximal Chebyshev fit degree along each axis
    """

    def __init__(self, x1: np.ndarray, xn: np.ndarray, degree: int = 16):
        self.x1 = np.asarray(x1, dtype=float)
        self.xn_axis = np.asarray(xn, dtype=float)
        self.shape = (len(self.xn_axis), len(self.x1))
        self.degree = degree
        self.xn = self.xn_axis[:, None]

    max_vertical_order = 64

    def derivative(self, values: np.ndarray, alpha: Sequence[int]) -> np.ndarray:
        out = chebyshev_derivative(values, self.x1, int(alpha[0]), axis=1, degree=self.degree)
        return chebyshev_derivative(out, self.xn_axis, int(alpha[1]), axis=0, degree=self.degree)

    def _weights(self, axis: np.ndarray) -> np.ndarray:
        return quadrature_weights(len(axis), float(axis[1] - axis[0]))

    def l2(self, values: np.ndarray) -> float:
        w = self._weights(self.xn_axis)[:, None] * self._weights(self.x1)[None, :]
        return float(np.sqrt(np.sum(w * values ** 2)))

    def trace_norm(self, row: np.ndarray, s: int) -> float:
        w = self._weights(self.x1)
        total = 0.0
        for order in range(s + 1):
            d = chebyshev_derivative(row, self.x1, order, axis=0, degree=self.degree)
            total += float(np.sqrt(np.sum(w * d ** 2)))
        return total

    def sobolev(self, values: np.ndarray, s: int) -> float:
        return sum(self.l2(self.derivative(values, alpha)) for order in range(s + 1) for alpha in multi_indices(order))
