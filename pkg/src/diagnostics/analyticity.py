"""Taylor coefficients at an endpoint and a root-test estimate of the convergence radius.

Differentiating a Chebyshev interpolant N times at the endpoint of the sampled interval
amplifies its noise plateau by sum_k |T_k^(N)(-1)|, which grows exponentially in N.
Each coefficient therefore carries its own noise floor and only coefficients clearly
above it take part in the radius fit. Profiles that can be evaluated off the real
axis avoid the amplification through the Cauchy integral.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np
from numpy.polynomial import Chebyshev
from numpy.polynomial import chebyshev as C

from ..core.errors import ConditioningError, ConfigurationError, InsufficientDataError
from ..core.fields import GridFunction
from ..transforms.frame import BoundaryFrame, FrameField, boundary_frame

logger = logging.getLogger(__name__)

MIN_SAMPLES = 64
N_MAX = 24
PLATEAU_WINDOW = 8
PLATEAU_LIMIT = 1e-6
NONZERO_RELATIVE = 1e-14
MIN_NONZERO = 8
MIN_FIT_POINTS = 3
FLOOR_FACTOR = 10.0
DIVERGENCE_POINTS = 6
DECREASING_SHARE = 0.8
TAYLOR_METHODS = ("auto", "contour", "chebyshev")


@dataclass
class TaylorSeries:
    """a_N = |f^(N)(0)| / N! with a noise floor per N.

    Args:
        coefficients: a_0 .. a_{n_max}
        floors: Noise floor of each a_N
        delta: Length of the sampled interval [0, delta] (the circle radius for "contour")
        plateau: Level of the discarded tail
        chebyshev: Chopped Chebyshev coefficients on [0, delta]; empty for "contour"
        method: "chebyshev" or "contour"
    """

    coefficients: np.ndarray
    floors: np.ndarray
    delta: float
    plateau: float = 0.0
    chebyshev: np.ndarray = field(default_factory=lambda: np.zeros(0))
    method: str = "chebyshev"

    @property
    def n_max(self) -> int:
        return len(self.coefficients) - 1

    def nonzero(self) -> np.ndarray:
        a = self.coefficients
        top = float(np.max(a)) if len(a) else 0.0
        return a > NONZERO_RELATIVE * top

    def usable(self, factor: float = FLOOR_FACTOR) -> np.ndarray:
        mask = self.nonzero() & (self.coefficients > factor * self.floors)
        mask[0] = False
        return mask

    def to_dict(self) -> Dict:
        return {
            "delta": self.delta,
            "method": self.method,
            "plateau": self.plateau,
            "coefficients": self.coefficients.tolist(),
            "floors": self.floors.tolist(),
        }


def _chebyshev_samples(profile: Callable, delta: float, n_samples: int) -> np.ndarray:
    return C.chebinterpolate(lambda x: profile(0.5 * delta * (x + 1.0)), n_samples - 1)


def endpoint_taylor(cheb: np.ndarray, delta: float, n_max: int) -> np.ndarray:
    """f^(N)(0) / N! for N <= n_max from Chebyshev coefficients on [0, delta].

    Derivatives are taken in the Chebyshev basis and evaluated at x = -1. A 2-D
    ``cheb`` holds one series per column.
    """
    c = np.asarray(cheb, dtype=float)
    out = np.zeros((n_max + 1,) + c.shape[1:])
    stretch = 2.0 / delta
    for N in range(n_max + 1):
        out[N] = C.chebval(-1.0, c) * stretch ** N / math.factorial(N)
        c = C.chebder(c)
    return out


def _contour_taylor(profile: Callable, radius: float, n_points: int, n_max: int) -> Optional[TaylorSeries]:
    """Trapezoid rule for the Cauchy integrals on |t| = radius.

    Returns None when the profile rejects complex input, returns real values for it,
    or has Fourier content at negative frequencies (a singularity inside the circle).
    """
    z = radius * np.exp(2j * np.pi * np.arange(n_points) / n_points)
    try:
        with np.errstate(all="ignore"):
            values = np.asarray(profile(z))
    except (TypeError, ValueError):
        return None
    if not np.iscomplexobj(values) or values.shape != z.shape or not np.all(np.isfinite(values)):
        return None
    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        return None
    scaled = np.fft.fft(values) / n_points
    plateau = max(float(np.max(np.abs(scaled[n_points // 2 :]))), np.finfo(float).eps * scale)
    if plateau > PLATEAU_LIMIT * scale:
        return None
    powers = radius ** -np.arange(n_max + 1, dtype=float)
    coefficients = np.abs(scaled[: n_max + 1]) * powers
    floors = n_points * np.finfo(float).eps * scale * powers
    return TaylorSeries(coefficients, floors, radius, plateau, method="contour")


def taylor_coefficients(
    profile: Union[Callable, np.ndarray],
    delta: float,
    n_samples: int = MIN_SAMPLES,
    n_max: int = N_MAX,
    t: Optional[np.ndarray] = None,
    method: str = "auto",
) -> TaylorSeries:
    """Taylor coefficients about t = 0 of a smooth profile on [0, delta].

    With ``method="auto"`` a callable that evaluates at complex t is expanded by the
    Cauchy integral on |t| = delta, which keeps a_N accurate to rounding times delta^-N.
    Everything else goes through the Chebyshev interpolant on [0, delta], whose
    endpoint derivatives lose accuracy quickly with N; the floors record how much.

    Args:
        profile: Callable f(t), or sampled values at ``t``
        delta: Interval length
        n_samples: Chebyshev (or contour) points used for a callable profile
        n_max: Highest coefficient returned
        t: Sample positions for array input
        method: "auto", "contour" or "chebyshev"

    Returns:
        TaylorSeries: Coefficients a_0..a_{n_max} with their noise floors

    Raises:
        ConditioningError: If the Chebyshev coefficients do not decay to a low plateau,
            or the contour expansion was requested and is not analytic in the disc
    """
    if delta <= 0:
        raise ConfigurationError("Interval length must be positive", {"delta": delta})
    if method not in TAYLOR_METHODS:
        raise ConfigurationError(f"Unknown Taylor method '{method}'", {"method": method})
    if callable(profile):
        if n_samples < MIN_SAMPLES:
            raise ConfigurationError("Taylor recovery needs at least 64 samples", {"samples": n_samples})
        if method != "chebyshev":
            series = _contour_taylor(profile, delta, max(n_samples, 2 * (n_max + 1)), n_max)
            if series is not None:
                logger.debug("Taylor recovery on |t| = %.3g, plateau %.2e", delta, series.plateau)
                return series
            if method == "contour":
                raise ConditioningError("Profile is not analytic in the disc |t| <= delta", {"delta": delta})
        cheb = _chebyshev_samples(profile, delta, n_samples)
    else:
        values = np.asarray(profile, dtype=float)
        if t is None or len(values) < MIN_SAMPLES:
            raise ConfigurationError("Sampled profiles need positions and at least 64 samples", {"samples": len(values)})
        if method == "contour":
            raise ConfigurationError("Contour recovery needs a callable profile", {"method": method})
        cheb = Chebyshev.fit(np.asarray(t, dtype=float), values, min(len(values) // 2, 48), domain=[0.0, delta]).coef

    scale = float(np.max(np.abs(cheb)))
    if scale == 0.0:
        zeros = np.zeros(n_max + 1)
        return TaylorSeries(zeros, zeros.copy(), delta)
    # never below rounding level, or exact zeros in the tail would disable the chop
    plateau = max(float(np.max(np.abs(cheb[-PLATEAU_WINDOW:]))), np.finfo(float).eps * scale)
    if plateau > PLATEAU_LIMIT * scale:
        raise ConditioningError(
            "Chebyshev coefficients do not decay; the profile is not smooth enough",
            {"plateau": plateau, "scale": scale},
        )
    # drop the tail from the last coefficient above the plateau band onwards
    above = np.nonzero(np.abs(cheb) > FLOOR_FACTOR * plateau)[0]
    cut = int(above[-1]) if len(above) else 0
    chopped = cheb[: cut + 1]

    coefficients = np.abs(endpoint_taylor(chopped, delta, n_max))
    floors = plateau * np.abs(endpoint_taylor(np.eye(cut + 1), delta, n_max)).sum(axis=1)
    logger.debug("Taylor recovery: %d Chebyshev terms kept, plateau %.2e", cut + 1, plateau)
    return TaylorSeries(coefficients, floors, delta, plateau, chopped)



@dataclass
class RadiusEstimate:
    radius: float
    divergent: bool
    slope: float
    used: List[int]

    def to_dict(self) -> Dict:
        return {"radius": self.radius, "divergent": self.divergent, "slope": self.slope, "used": self.used}


def _local_radii(N: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.exp(np.diff(y) / np.diff(N))


def _diverges(N: np.ndarray, y: np.ndarray) -> bool:
    if len(N) < DIVERGENCE_POINTS:
        return False
    radii = _local_radii(N, y)
    decreasing = np.mean(np.diff(radii) < 0.0)
    return bool(decreasing >= DECREASING_SHARE and radii[-1] < radii[0] / 4.0)


def analyticity_radius(a: Union[TaylorSeries, Sequence[float]]) -> RadiusEstimate:
    """Root-test radius from a line fit of -log a_N against N.

    Args:
        a: TaylorSeries (noise floors respected) or plain coefficients a_0, a_1, ...

    Returns:
        RadiusEstimate: radius exp(slope), or 0 with ``divergent`` set for factorial growth

    Raises:
        InsufficientDataError: If fewer than 8 coefficients are nonzero or fewer than 3 are usable
    """
    series = a if isinstance(a, TaylorSeries) else TaylorSeries(
        np.abs(np.asarray(a, dtype=float)), np.zeros(len(a)), 1.0
    )
    nonzero = int(np.count_nonzero(series.nonzero()))
    if nonzero < MIN_NONZERO:
        raise InsufficientDataError(
            "Fewer than 8 nonzero coefficients; the profile looks polynomial", {"nonzero": nonzero}
        )
    N = np.nonzero(series.usable())[0]
    if len(N) < MIN_FIT_POINTS:
        raise InsufficientDataError("Too few coefficients above the noise floor", {"usable": N.tolist()})
    y = -np.log(series.coefficients[N])
    slope = float(np.polyfit(N.astype(float), y, 1)[0])
    if _diverges(N, y):
        logger.info("Coefficients grow factorially; radius reported as 0")
        return RadiusEstimate(0.0, True, slope, N.tolist())
    radius = float(np.exp(slope))
    logger.info("Analyticity radius %.4g from %d coefficients", radius, len(N))
    return RadiusEstimate(radius, False, slope, N.tolist())


def normal_series(
    u: GridFunction,
    frame: Optional[BoundaryFrame] = None,
    n_samples: int = MIN_SAMPLES,
    n_max: int = N_MAX,
) -> TaylorSeries:
    """Taylor series of s -> u(0, s) along the frame normal on [0, delta].

    Grid data has no continuation off the real axis, so the Chebyshev route is used.
    """
    frame = frame or boundary_frame(u)
    field_ = FrameField.from_grid(u, frame)
    return taylor_coefficients(
        lambda s: field_(np.zeros_like(s), s), frame.delta, n_samples, n_max, method="chebyshev"
    )
