"""Damped Newton iteration for det D^2 u = lam (-u)^q with zero boundary values.

Every domain is solved on the reference unit disc: for u(x, y) = U(x / a, y / b),
det D^2 u = det D^2 U / (ab)^2, so U solves the same equation with lam (ab)^2.
"""

import logging
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.sparse import diags
from scipy.sparse.linalg import spsolve

from ..core.domain import Domain2D
from ..core.errors import ConfigurationError, ConvexityError, NegativityError, NonConvergenceError
from ..core.fields import GridFunction
from ..core.polar import PolarMesh
from .config import NewtonConfig
from .oracle import radial_oracle
from .solution import IterationRecord, MASolution

logger = logging.getLogger(__name__)

Source = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]


def reference_lambda(domain: Domain2D, lam: float) -> float:
    return lam * domain.lambda_factor


def negative_power(values: np.ndarray, q: float) -> np.ndarray:
    """(-u)^q with the boundary ring evaluated exactly as 0 for q > 0."""
    w = np.maximum(-np.asarray(values, dtype=float), 0.0)
    if q == 0:
        return np.ones_like(w)
    return w ** q


def power_source(q: float, lam: float) -> Source:
    """Right-hand side lam (-U)^q and its derivative with respect to U."""

    def source(U: np.ndarray):
        w = np.maximum(-U, 0.0)
        value = negative_power(U, q) * lam
        if q == 0:
            return value, np.zeros_like(U)
        return value, -lam * q * w ** (q - 1)

    return source


def fixed_source(g: np.ndarray) -> Source:
    g = np.asarray(g, dtype=float)
    return lambda U: (g, np.zeros_like(U))


def admissibility(mesh: PolarMesh, U: np.ndarray) -> Optional[str]:
    """Name the first violated invariant of a trial iterate, or None."""
    interior = mesh.interior_mask
    if np.any(U[interior] >= 0.0):
        return "negativity"
    H = mesh.hessian(U)
    if np.any(H.rr[interior] < 0.0) or np.any(H.tt[interior] < 0.0) or np.any(H.det[interior] < 0.0):
        return "convexity"
    return None


def _residual(mesh: PolarMesh, U: np.ndarray, source: Source) -> np.ndarray:
    H = mesh.hessian(U)
    value, _ = source(U)
    F = H.det - value
    F[-1] = 0.0
    return F


def default_initializer(mesh: PolarMesh, q: float, lam_ref: float) -> np.ndarray:
    """Paraboloid c (|x|^2 - 1) / 2 whose centre residual vanishes.

    c^2 = lam (c / 2)^q gives c = (lam 2^-q)^(1 / (2 - q)); q in {0, 2} falls back to c = 1.
    """
    if q in (0, 2):
        c = 1.0
    else:
        c = (lam_ref * 2.0 ** (-q)) ** (1.0 / (2.0 - q))
    U = c * (mesh.R ** 2 - 1.0) / 2.0
    U[-1] = 0.0
    return U


def radial_initializer(mesh: PolarMesh, q: float, lam_ref: float) -> np.ndarray:
    """Radial shooting profile sampled on the mesh, the starting iterate for q > 2.

    Above q = 2 the paraboloid start sits on the wrong side of the solution and
    the line search cannot keep it convex.
    """
    profile = radial_oracle(q, "dirichlet", lam=lam_ref)
    U = np.minimum(profile.evaluate(mesh.R), 0.0)
    U[-1] = 0.0
    return U


def initial_iterate(mesh: PolarMesh, q: float, lam_ref: float) -> np.ndarray:
    if q > 2:
        return radial_initializer(mesh, q, lam_ref)
    return default_initializer(mesh, q, lam_ref)


def newton_iterate(
    mesh: PolarMesh,
    U0: np.ndarray,
    source: Source,
    cfg: NewtonConfig,
    tol_scale: Optional[float] = None,
) -> Tuple[np.ndarray, float, List[IterationRecord]]:
    """Damped Newton on the reference mesh.

    Args:
        mesh: Reference polar mesh
        U0: Admissible initial iterate (zero boundary ring)
        source: Right-hand side and its derivative as a function of U
        cfg: Newton settings
        tol_scale: Fixed tolerance scale; defaults to max(1, ||source||_inf) at each step

    Returns:
        Tuple: (solution values, final L-inf residual, iteration trace)

    Raises:
        ConvexityError: If backtracking cannot keep the iterate convex
        NegativityError: If backtracking cannot keep the iterate negative
        NonConvergenceError: If max_iter is reached
    """
    U = np.array(U0, dtype=float)
    U[-1] = 0.0
    reason = admissibility(mesh, U)
    if reason == "negativity":
        raise NegativityError("Initial iterate is not negative in the interior")
    if reason == "convexity":
        raise ConvexityError("Initial iterate is not discretely convex")

    interior = mesh.interior
    F = _residual(mesh, U, source)
    norm = float(np.max(np.abs(F)))
    trace = [IterationRecord(0, norm, 1.0)]

    for step in range(1, cfg.max_iter + 1):
        scale = tol_scale if tol_scale is not None else max(1.0, float(np.max(np.abs(source(U)[0]))))
        if norm <= cfg.tol * scale:
            return U, norm, trace

        _, dsource = source(U)
        J = mesh.det_jacobian(U) + diags(-dsource.ravel())
        J = J.tocsr()[interior][:, interior]
        delta = np.zeros(mesh.size)
        delta[interior] = spsolve(J.tocsc(), -F.ravel()[interior])
        delta = delta.reshape(mesh.shape)

        t = 1.0
        failure = None
        for _ in range(cfg.max_halvings):
            trial = U + t * delta
            failure = admissibility(mesh, trial)
            if failure is None:
                F_trial = _residual(mesh, trial, source)
                trial_norm = float(np.max(np.abs(F_trial)))
                if trial_norm <= (1.0 - cfg.armijo * t) * norm:
                    break
                failure = "decrease"
            t *= cfg.damping
        else:
            if failure == "negativity":
                raise NegativityError("Damping exhausted: iterate touches zero in the interior", {"step": step})
            if failure == "convexity":
                raise ConvexityError("Damping exhausted: discrete convexity lost", {"step": step})
            raise NonConvergenceError(
                "Line search found no sufficient decrease", {"step": step, "residual": norm}
            )

        U, F, norm = trial, F_trial, trial_norm
        trace.append(IterationRecord(step, norm, t))
        logger.debug("Newton step %d: residual %.3e, damping %.3g", step, norm, t)

    scale = tol_scale if tol_scale is not None else max(1.0, float(np.max(np.abs(source(U)[0]))))
    if norm <= cfg.tol * scale:
        return U, norm, trace
    raise NonConvergenceError(
        "Newton iteration did not reach the tolerance", {"max_iter": cfg.max_iter, "residual": norm}
    )


def ma_residual(u: GridFunction, q: float, lam: float) -> np.ndarray:
    """Pointwise det D^2 u - lam (-u)^q on the physical domain (zero on the boundary ring)."""
    mesh = u.mesh
    factor = u.domain.lambda_factor
    F = _residual(mesh, u.values, power_source(q, lam * factor))
    return F / factor


def newton_solve(
    domain: Domain2D,
    q: float,
    lam: float,
    cfg: Optional[NewtonConfig] = None,
    u0: Optional[GridFunction] = None,
    n_r: int = 64,
    n_theta: int = 64,
) -> MASolution:
    """Solve det D^2 u = lam (-u)^q in the domain with u = 0 on its boundary.

    Args:
        domain: Disc or ellipse
        q: Exponent, q >= 0
        lam: Positive constant
        cfg: Newton settings
        u0: Initial iterate; its shape fixes the mesh when given
        n_r: Radial points when u0 is absent
        n_theta: Angular points when u0 is absent

    Returns:
        MASolution: The converged solution
    """
    cfg = cfg or NewtonConfig()
    if q < 0:
        raise ConfigurationError("Exponent q must be non-negative", {"q": q})
    if lam <= 0:
        raise ConfigurationError("lambda must be positive", {"lambda": lam})
    if u0 is not None:
        n_r, n_theta = u0.values.shape
    mesh = PolarMesh.create(n_r, n_theta)
    lam_ref = reference_lambda(domain, lam)
    U0 = u0.values if u0 is not None else initial_iterate(mesh, q, lam_ref)

    U, _, trace = newton_iterate(mesh, U0, power_source(q, lam_ref), cfg)
    u = GridFunction(domain, U, {"q": q, "lambda": lam})
    residual = float(np.max(np.abs(ma_residual(u, q, lam))))
    logger.info("Newton converged in %d steps (q=%g, lambda=%g, residual=%.3e)", len(trace) - 1, q, lam, residual)
    return MASolution(u, q, lam, residual, trace)
