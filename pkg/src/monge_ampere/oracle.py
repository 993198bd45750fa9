"""Radial shooting oracle: u'' u' / r = lam (-u)^q, u'(0) = 0, u(R) = 0."""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from numpy.polynomial import Chebyshev
from scipy.integrate import solve_ivp
from scipy.interpolate import BarycentricInterpolator
from scipy.optimize import brentq

from ..core.errors import ConfigurationError, OracleError

logger = logging.getLogger(__name__)

ORACLE_MODES = ("dirichlet", "eigen")
NODES = 33
START_FRACTION = 1e-4
MAX_EXPANSIONS = 40


def lobatto_nodes(R: float, count: int = NODES) -> np.ndarray:
    """Chebyshev-Lobatto points on [0, R], increasing, both ends included."""
    return R * (1.0 - np.cos(np.pi * np.arange(count) / (count - 1))) / 2.0


@dataclass
class RadialProfile:
    """Radial solution sampled at Chebyshev-Lobatto radii.

    Args:
        r: Radii in [0, R], r[0] = 0 and r[-1] = R
        values: u(r)
        derivative: u'(r)
        q: Exponent
        lam: Constant (the eigenvalue in eigen mode)
        R: Radius
        mode: "dirichlet" or "eigen"
    """

    r: np.ndarray
    values: np.ndarray
    derivative: np.ndarray
    q: float
    lam: float
    R: float
    mode: str = "dirichlet"

    @property
    def center_value(self) -> float:
        return float(self.values[0])

    def evaluate(self, r) -> np.ndarray:
        return BarycentricInterpolator(self.r, self.values)(np.asarray(r, dtype=float))

    def _node_derivative(self, samples: np.ndarray) -> np.ndarray:
        """Derivative at the nodes of the Chebyshev interpolant through the samples."""
        interpolant = Chebyshev.fit(self.r, samples, len(self.r) - 1, domain=[0.0, self.R])
        return interpolant.deriv()(self.r)

    def residual(self) -> float:
        """Max defect of the first-order system u' = p, (p^2 / 2)' = lam r (-u)^q on the nodes."""
        first = self._node_derivative(self.values) - self.derivative
        second = self._node_derivative(self.derivative ** 2 / 2.0) - self.lam * self.r * np.maximum(-self.values, 0.0) ** self.q
        return float(max(np.max(np.abs(first)), np.max(np.abs(second))))

    def to_dict(self) -> Dict:
        return {
            "mode": self.mode,
            "q": self.q,
            "lambda": self.lam,
            "R": self.R,
            "center_value": self.center_value,
            "residual": self.residual(),
        }


class _Shooter:
    """Integrates from the origin until u reaches 0."""

    def __init__(self, q: float, method: str, rtol: float):
        self.q = q
        self.method = method
        self.rtol = rtol

    def start(self, u0: float, lam: float, r_s: float) -> Tuple[float, float, float]:
        c = np.sqrt(lam * (-u0) ** self.q)
        return u0 + c * r_s ** 2 / 2.0, c ** 2 * r_s ** 2 / 2.0, c

    def integrate(self, u0: float, lam: float, scale: float, dense: bool = False):
        q = self.q
        r_s = START_FRACTION * scale
        u_s, w_s, c = self.start(u0, lam, r_s)

        def rhs(r, y):
            u, w = y
            return [np.sqrt(2.0 * max(w, 0.0)), lam * r * max(-u, 0.0) ** q]

        def hit_zero(r, y):
            return y[0]

        hit_zero.terminal = True
        hit_zero.direction = 1
        r_max = r_s + abs(u_s) / max(c * r_s, 1e-300) + scale
        sol = solve_ivp(
            rhs,
            (r_s, r_max),
            [u_s, w_s],
            method=self.method,
            rtol=self.rtol,
            atol=self.rtol * 1e-3 * max(abs(u0), 1.0),
            events=hit_zero,
            dense_output=dense,
        )
        if sol.status != 1 or not len(sol.t_events[0]):
            raise OracleError("Radial integration never reached u = 0", {"u0": u0, "lambda": lam})
        return float(sol.t_events[0][0]), sol, (r_s, c)

    def zero_radius(self, u0: float, lam: float, scale: float) -> float:
        return self.integrate(u0, lam, scale)[0]


def _bracket_root(func, s0: float) -> float:
    """Root of func in log space, widening [s0 - 1, s0 + 1] by 2 on each side per attempt."""
    lo, hi = s0 - 1.0, s0 + 1.0
    f_lo, f_hi = func(lo), func(hi)
    for _ in range(MAX_EXPANSIONS):
        if np.sign(f_lo) != np.sign(f_hi):
            return brentq(func, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        if abs(f_lo) < abs(f_hi):
            lo, f_lo = lo - 2.0, func(lo - 2.0)
        else:
            hi, f_hi = hi + 2.0, func(hi + 2.0)
    raise OracleError("Shooting bracket not found", {"last_bracket": [lo, hi]})


def radial_oracle(
    q: float,
    mode: str = "dirichlet",
    R: float = 1.0,
    lam: float = 1.0,
    method: str = "DOP853",
    rtol: float = 1e-12,
    nodes: int = NODES,
) -> RadialProfile:
    """Solve the radial problem by shooting on u(0) (or on lam in eigen mode).

    Args:
        q: Exponent, q >= 0 (q = 2 in eigen mode)
        mode: "dirichlet" uses the given lam; "eigen" fixes u(0) = -1 and returns lam
        R: Radius
        lam: Constant for the Dirichlet mode
        method: solve_ivp method
        rtol: Integrator tolerance

    Returns:
        RadialProfile: Samples at Chebyshev-Lobatto radii

    Raises:
        OracleError: If no shooting bracket is found (always the case for q = 2 Dirichlet)
    """
    if mode not in ORACLE_MODES:
        raise ConfigurationError(f"Unknown oracle mode '{mode}'", {"mode": mode})
    if q < 0 or R <= 0 or lam <= 0:
        raise ConfigurationError("Need q >= 0, R > 0 and lambda > 0", {"q": q, "R": R, "lambda": lam})
    shooter = _Shooter(q, method, rtol)

    if mode == "dirichlet":
        s = _bracket_root(lambda s: shooter.zero_radius(-np.exp(s), lam, R) - R, np.log(R ** 2 / 2.0))
        u0 = -float(np.exp(s))
    else:
        s = _bracket_root(lambda s: shooter.zero_radius(-1.0, np.exp(s), R) - R, -4.0 * np.log(R))
        lam = float(np.exp(s))
        u0 = -1.0

    _, sol, (r_s, c) = shooter.integrate(u0, lam, R, dense=True)
    r = lobatto_nodes(R, nodes)
    values = np.empty_like(r)
    derivative = np.empty_like(r)
    near = r < r_s
    values[near] = u0 + c * r[near] ** 2 / 2.0
    derivative[near] = c * r[near]
    y = sol.sol(r[~near])
    values[~near] = y[0]
    derivative[~near] = np.sqrt(2.0 * np.maximum(y[1], 0.0))
    logger.info("Radial oracle (%s, q=%g): u(0)=%.12g, lambda=%.12g", mode, q, u0, lam)
    return RadialProfile(r, values, derivative, q, lam, R, mode)
