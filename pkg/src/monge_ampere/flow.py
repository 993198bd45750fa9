"""Logarithmic gradient flow u_t = ln det D^2 u - q ln(-u) - ln lam."""

import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from ..core.errors import NegativityError, StiffnessError
from ..core.fields import GridFunction
from ..core.polar import PolarMesh
from .config import FlowConfig
from .functionals import functional_J
from .newton import admissibility

logger = logging.getLogger(__name__)


@dataclass
class FlowRecord:
    step: int
    residual: float
    J: float
    dt: float


@dataclass
class FlowResult:
    """Final state and per-step history of a flow run."""

    u: GridFunction
    q: float
    lam: float
    history: List[FlowRecord] = field(default_factory=list)
    converged: bool = False

    @property
    def residual(self) -> float:
        return self.history[-1].residual if self.history else float("nan")

    def to_dict(self) -> Dict:
        return {
            "q": self.q,
            "lambda": self.lam,
            "converged": self.converged,
            "residual": self.residual,
            "history": [asdict(record) for record in self.history],
        }


def flow_rhs(mesh: PolarMesh, U: np.ndarray, q: float, lam_ref: float) -> np.ndarray:
    """ln det - q ln(-U) - ln lam at interior nodes, zero on the boundary ring.

    Non-finite entries mark a lost invariant (det <= 0 or U >= 0).
    """
    G = np.zeros(mesh.shape)
    interior = mesh.interior_mask
    det = mesh.hessian(U).det
    with np.errstate(divide="ignore", invalid="ignore"):
        G[interior] = np.log(det[interior]) - q * np.log(-U[interior]) - np.log(lam_ref)
    return G


def _flow_jacobian(mesh: PolarMesh, U: np.ndarray, q: float) -> sparse.csr_matrix:
    det = mesh.hessian(U).det.ravel()
    u = U.ravel()
    with np.errstate(divide="ignore"):
        inv_det = np.where(det > 0, 1.0 / det, 0.0)
        dlog = np.where(u < 0, -q / u, 0.0)
    return (sparse.diags(inv_det) @ mesh.det_jacobian(U) + sparse.diags(dlog)).tocsr()


def _increment(mesh: PolarMesh, U: np.ndarray, G: np.ndarray, q: float, dt: float, scheme: str) -> np.ndarray:
    if scheme == "explicit":
        return dt * G
    interior = mesh.interior
    J = _flow_jacobian(mesh, U, q)[interior][:, interior]
    A = sparse.identity(len(interior), format="csr") - dt * J
    delta = np.zeros(mesh.size)
    delta[interior] = spsolve(A.tocsc(), dt * G.ravel()[interior])
    return delta.reshape(mesh.shape)


def _advance(
    mesh: PolarMesh, U: np.ndarray, q: float, lam_ref: float, cfg: FlowConfig
) -> Tuple[np.ndarray, float, np.ndarray]:
    G = flow_rhs(mesh, U, q, lam_ref)
    if not np.all(np.isfinite(G)):
        raise NegativityError("Flow state is not strictly convex and negative")
    dt = cfg.dt
    for attempt in range(cfg.max_halvings + 1):
        trial = U + _increment(mesh, U, G, q, dt, cfg.scheme)
        trial[-1] = 0.0
        if admissibility(mesh, trial) is None and np.all(np.isfinite(flow_rhs(mesh, trial, q, lam_ref))):
            if attempt:
                logger.warning("Flow step accepted after %d dt halvings (dt=%.3e)", attempt, dt)
            return trial, dt, G
        dt *= 0.5
    raise StiffnessError("Time step underflow in the flow", {"dt": dt, "halvings": cfg.max_halvings})


def flow_step(u: GridFunction, q: float, cfg: Optional[FlowConfig] = None, lam: float = 1.0) -> GridFunction:
    """One Euler step of the flow with the boundary held at 0.

    The time step is halved (up to ``cfg.max_halvings`` times) while the update breaks
    convexity or negativity.

    Args:
        u: Strictly convex, negative state
        q: Exponent
        cfg: Flow settings
        lam: Constant inside the logarithm

    Returns:
        GridFunction: New state, with the used dt in its metadata

    Raises:
        StiffnessError: If dt underflows
    """
    cfg = cfg or FlowConfig()
    lam_ref = lam * u.domain.lambda_factor
    U, dt, G = _advance(u.mesh, u.values, q, lam_ref, cfg)
    return u.with_values(U, dt=dt, flow_residual=float(np.max(np.abs(G))))


def run_flow(u0: GridFunction, q: float, cfg: Optional[FlowConfig] = None, lam: float = 1.0) -> FlowResult:
    """Run the flow until the right-hand side drops below residual_stop or steps run out.

    J is recorded per step as a diagnostic; no monotonicity is asserted.
    """
    cfg = cfg or FlowConfig()
    mesh = u0.mesh
    lam_ref = lam * u0.domain.lambda_factor
    U = u0.values.copy()
    U[-1] = 0.0
    result = FlowResult(u0, q, lam)

    for step in range(cfg.steps + 1):
        G = flow_rhs(mesh, U, q, lam_ref)
        residual = float(np.max(np.abs(G)))
        current = u0.with_values(U)
        if residual <= cfg.residual_stop:
            result.history.append(FlowRecord(step, residual, functional_J(current, q, lam), 0.0))
            result.converged = True
            break
        if step == cfg.steps:
            result.history.append(FlowRecord(step, residual, functional_J(current, q, lam), 0.0))
            break
        U, dt, _ = _advance(mesh, U, q, lam_ref, cfg)
        result.history.append(FlowRecord(step, residual, functional_J(current, q, lam), dt))
        logger.debug("Flow step %d: residual %.3e, dt %.3e", step, residual, dt)

    result.u = u0.with_values(U)
    logger.info("Flow finished after %d steps, residual %.3e", len(result.history) - 1, result.residual)
    return result
