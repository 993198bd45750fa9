"""Normalized inverse iteration for the Monge-Ampere eigenvalue problem (q = n = 2)."""

import logging
from typing import Optional

import numpy as np

from ..core.domain import Domain2D
from ..core.errors import ConfigurationError, NonConvergenceError
from ..core.fields import GridFunction
from ..core.polar import PolarMesh
from .config import NewtonConfig
from .newton import default_initializer, fixed_source, ma_residual, newton_iterate
from .solution import IterationRecord, MASolution

logger = logging.getLogger(__name__)

STAGNATION_STEPS = 10


def eigen_solve(
    domain: Domain2D,
    n_eq: int = 2,
    cfg: Optional[NewtonConfig] = None,
    n_r: int = 64,
    n_theta: int = 64,
    tol: float = 1e-10,
    max_outer: int = 500,
) -> MASolution:
    """Find (lam, u) with det D^2 u = lam (-u)^2, u = 0 on the boundary and ||u||_inf = 1.

    Each outer step solves det D^2 v = (-u_k)^2 with the Newton machinery, then sets
    lam = ||v||^-2 and u_{k+1} = v / ||v||.

    Args:
        domain: Disc or ellipse
        n_eq: Dimension, only 2 is supported
        cfg: Settings of the inner Newton solves
        n_r: Radial points
        n_theta: Angular points
        tol: Stop when the relative change of lam drops below this
        max_outer: Outer iteration cap

    Returns:
        MASolution: Eigenpair with mode "eigen"

    Raises:
        NonConvergenceError: If the eigenvalue stagnates for 10 steps or max_outer is hit
    """
    if n_eq != 2:
        raise ConfigurationError("Only the planar eigenvalue problem is supported", {"n_eq": n_eq})
    cfg = cfg or NewtonConfig()
    mesh = PolarMesh.create(n_r, n_theta)
    factor = domain.lambda_factor

    U = default_initializer(mesh, 2, 1.0)
    U = U / np.max(np.abs(U))
    lam_ref = None
    best = np.inf
    since_best = 0
    trace = []

    for outer in range(1, max_outer + 1):
        g = np.maximum(-U, 0.0) ** 2
        guess = U / np.sqrt(lam_ref) if lam_ref else U
        V, _, inner = newton_iterate(mesh, guess, fixed_source(g), cfg, tol_scale=max(1.0, float(g.max())))
        sup = float(np.max(np.abs(V)))
        new_lam = sup ** -2
        U = V / sup
        change = abs(new_lam - lam_ref) / new_lam if lam_ref else np.inf
        lam_ref = new_lam
        trace.append(IterationRecord(outer, float(change), float(inner[-1].damping)))
        logger.debug("Inverse iteration %d: lambda_ref=%.12g, change %.3e", outer, lam_ref, change)

        if change <= tol:
            break
        if change < best:
            best, since_best = change, 0
        else:
            since_best += 1
            if since_best >= STAGNATION_STEPS:
                raise NonConvergenceError(
                    "Inverse iteration stagnated", {"step": outer, "change": float(change), "best": float(best)}
                )
    else:
        raise NonConvergenceError("Inverse iteration hit max_outer", {"max_outer": max_outer})

    lam = lam_ref / factor
    u = GridFunction(domain, U, {"q": 2, "lambda": lam, "mode": "eigen"})
    residual = float(np.max(np.abs(ma_residual(u, 2, lam))))
    logger.info("Eigenvalue %.10g after %d inverse iterations", lam, len(trace))
    return MASolution(u, 2, lam, residual, trace, mode="eigen")
