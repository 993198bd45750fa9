"""Dispatch of a RunConfig to the owning module, with outputs and the manifest."""

import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
from dotenv import load_dotenv

from ..core.domain import Domain2D
from ..core.errors import DegmaError, InputError, PersistenceError
from ..core.fields import GridFunction, StripField
from ..core.parallel import resolve_workers
from ..core.persistence import ensure_directory, export_field_csv, read_field, write_csv, write_field, write_json
from ..core.polar import PolarMesh
from ..diagnostics.analyticity import analyticity_radius, normal_series
from ..diagnostics.combinatorics import verify_cl1
from ..diagnostics.cutoff import CutoffProfile
from ..diagnostics.exponent import boundary_exponent_fit
from ..diagnostics.induction import induction_constants
from ..grushin.estimates import algebra_ratios, ratio_ensemble
from ..grushin.norms import COMPONENTS
from ..monge_ampere.config import FlowConfig, NewtonConfig
from ..monge_ampere.eigen import eigen_solve
from ..monge_ampere.flow import run_flow
from ..monge_ampere.functionals import rayleigh_lambda
from ..monge_ampere.geometry import level_set_curvature
from ..monge_ampere.newton import initial_iterate, newton_solve, reference_lambda
from ..monge_ampere.oracle import radial_oracle
from ..transforms.frame import boundary_frame
from ..transforms.hodograph import hodograph_forward
from ..transforms.legendre import partial_legendre
from ..transforms.patch import PatchField
from ..transforms.residual import pl_residual
from ..ui.terminal import TerminalUI, setup_logging
from .config import RunConfig
from .manifest import RunManifest
from .parser import parse_args

logger = logging.getLogger(__name__)

ERROR_NAME = "error.json"


class RunContext:
    """Output directory, worker count and manifest of one run."""

    def __init__(self, config: RunConfig, workers: int):
        self.config = config
        self.workers = workers
        self.out_dir = Path(config.out_dir)
        self.manifest = RunManifest.start(config, workers)

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def dump(self, name: str, obj) -> Path:
        path = write_field(self.path(name), obj)
        self.manifest.add_output(path)
        return path

    def table(self, name: str, header: List[str], rows) -> Path:
        path = write_csv(self.path(name), header, rows)
        self.manifest.add_output(path)
        return path

    def summary(self, name: str, data: Dict) -> Path:
        path = write_json(self.path(name), data)
        self.manifest.add_output(path)
        return path


def _domain(config: RunConfig) -> Domain2D:
    return Domain2D.from_axes(*config.domain)


def _newton_config(config: RunConfig) -> NewtonConfig:
    return NewtonConfig(tol=config.tol, max_iter=config.max_iter)


def _linear_m(config: RunConfig) -> int:
    return config.m if config.m is not None else 1


def _read_grid(path: str) -> GridFunction:
    u = read_field(path)
    if not isinstance(u, GridFunction):
        raise InputError("Expected a grid function dump", {"path": path, "type": type(u).__name__})
    return u


def _solve_q(config: RunConfig, q: float, n_r: Optional[int] = None) -> GridFunction:
    """Dirichlet solve, or the eigenfunction when q = 2 (no Dirichlet solution exists)."""
    n_r = n_r or config.nr
    if q == 2:
        return eigen_solve(_domain(config), cfg=_newton_config(config), n_r=n_r, n_theta=config.ntheta).u
    return newton_solve(_domain(config), q, config.lam, _newton_config(config), n_r=n_r, n_theta=config.ntheta).u


def _solution_or_input(config: RunConfig) -> GridFunction:
    if config.input:
        return _read_grid(config.input)
    return _solve_q(config, config.q)


def run_solve(ctx: RunContext):
    config = ctx.config
    with ctx.manifest.phase("newton"):
        sol = newton_solve(_domain(config), config.q, config.lam, _newton_config(config), n_r=config.nr, n_theta=config.ntheta)
    ctx.dump("solution.dgma", sol.u)
    ctx.summary("solution_summary.json", sol.to_dict())
    ctx.manifest.add_result(
        q=sol.q, **{"lambda": sol.lam}, residual=sol.residual, iterations=len(sol.iterations) - 1, center_value=sol.center_value
    )


def run_eigen(ctx: RunContext):
    config = ctx.config
    with ctx.manifest.phase("inverse-iteration"):
        sol = eigen_solve(_domain(config), cfg=_newton_config(config), n_r=config.nr, n_theta=config.ntheta, tol=config.tol)
    with ctx.manifest.phase("rayleigh"):
        rayleigh = rayleigh_lambda(sol.u, 2)
    ctx.dump("eigenfunction.dgma", sol.u)
    ctx.summary("eigen_summary.json", dict(sol.to_dict(), rayleigh=rayleigh))
    ctx.manifest.add_result(**{"lambda": sol.lam}, rayleigh=rayleigh, residual=sol.residual, iterations=len(sol.iterations))


def run_flow_command(ctx: RunContext):
    config = ctx.config
    if config.input:
        u0 = _read_grid(config.input)
    else:
        domain = _domain(config)
        mesh = PolarMesh.create(config.nr, config.ntheta)
        U0 = initial_iterate(mesh, config.q, reference_lambda(domain, config.lam))
        u0 = GridFunction(domain, U0, {"q": config.q, "lambda": config.lam})
    cfg = FlowConfig(config.dt, config.steps, config.residual_stop, config.scheme)
    with ctx.manifest.phase("flow"):
        result = run_flow(u0, config.q, cfg, config.lam)
    ctx.dump("flow.dgma", result.u)
    ctx.table("flow_history.csv", ["step", "residual", "J", "dt"], [[h.step, h.residual, h.J, h.dt] for h in result.history])
    ctx.manifest.add_result(
        q=config.q, converged=result.converged, residual=result.residual, steps=len(result.history) - 1
    )


def run_verify_linear(ctx: RunContext):
    config = ctx.config
    with ctx.manifest.phase("ratio-ensemble"):
        records = ratio_ensemble(
            _linear_m(config), config.k, config.modes, config.vertical, config.samples, config.seed, config.grid, workers=ctx.workers
        )
    header = ["case", "ratio", "h", *COMPONENTS, "data_norm"]
    ctx.table("ratios.csv", header, [[r.to_row()[name] for name in header] for r in records])
    summary = {"m": _linear_m(config), "k": config.k, "samples": config.samples, "seed": config.seed, "max_ratio": max(r.ratio for r in records)}
    if config.algebra:
        with ctx.manifest.phase("algebra"):
            ratios = algebra_ratios(config.k, config.samples, config.seed, _linear_m(config), config.modes, config.vertical, workers=ctx.workers)
        ctx.table("algebra.csv", ["case", "ratio"], [[f"pair-{i}", r] for i, r in enumerate(ratios)])
        summary["algebra_constant"] = max(ratios)
    ctx.summary("verify_linear.json", summary)
    ctx.manifest.add_result(**summary)


def run_transform(ctx: RunContext):
    config = ctx.config
    u = _read_grid(config.input)
    m = config.m if config.m is not None else int(u.metadata.get("q", 2))
    with ctx.manifest.phase("frame"):
        frame = boundary_frame(u, config.point, config.delta)
    with ctx.manifest.phase("hodograph"):
        v = hodograph_forward(u, frame)
    with ctx.manifest.phase("partial-legendre"):
        v_star = partial_legendre(v, workers=ctx.workers)
        residual = pl_residual(v_star, m, frame.frame_lambda)
    ctx.dump("v.dgma", v)
    ctx.dump("v_star.dgma", v_star)
    report = {
        "identity_residual": v.metadata["identity_residual"],
        "pl_residual": residual,
        "m": m,
        "frame": frame.to_dict(),
    }
    ctx.summary("transform_report.json", report)
    ctx.manifest.add_result(identity_residual=report["identity_residual"], pl_residual=residual, delta=frame.delta, m=m)


def _diagnose_exponent(ctx: RunContext):
    config = ctx.config
    rows = []
    if config.input:
        u = _read_grid(config.input)
        cases = [(float(u.metadata.get("q", config.q)), u, None)]
    else:
        cases = []
        for q in range(1, config.qmax + 1):
            with ctx.manifest.phase(f"solve-q{q}"):
                cases.append((float(q), _solve_q(config, q), _solve_q(config, q, config.nr // 2)))
    for q, u, coarse in cases:
        with ctx.manifest.phase("exponent-fit"):
            frame = boundary_frame(u, config.point, config.delta)
            fit = boundary_exponent_fit(u, frame, q, coarse)
        rows.append([q, fit.gamma, q + 2, fit.prefactor, 1.0 / ((q + 1) * (q + 2)), fit.residual])
        ctx.manifest.add_result(q=q, gamma=fit.gamma, expected=q + 2, prefactor=fit.prefactor)
    ctx.table("exponent.csv", ["q", "gamma", "expected", "prefactor", "model_prefactor", "residual"], rows)


def _diagnose_radius(ctx: RunContext):
    config = ctx.config
    u = _solution_or_input(config)
    with ctx.manifest.phase("taylor"):
        frame = boundary_frame(u, config.point, config.delta)
        series = normal_series(u, frame)
        estimate = analyticity_radius(series)
    rows = [[N, a, floor] for N, (a, floor) in enumerate(zip(series.coefficients, series.floors))]
    ctx.table("taylor.csv", ["N", "a_N", "floor_N"], rows)
    ctx.manifest.add_result(radius=estimate.radius, divergent=estimate.divergent, used=len(estimate.used), delta=frame.delta)


def _diagnose_induction(ctx: RunContext):
    config = ctx.config
    u = read_field(config.input)
    if isinstance(u, StripField):
        eta = CutoffProfile(config.r or u.period / 8, u.period)
    elif isinstance(u, PatchField):
        eta = CutoffProfile(config.r or u.delta / 2)
    else:
        raise InputError("Induction needs a strip or patch dump", {"type": type(u).__name__})
    with ctx.manifest.phase("induction"):
        fit = induction_constants(u, config.k, config.n_max, eta, _linear_m(config), workers=ctx.workers)
    ctx.table("induction.csv", ["N", "s_N", "bound_N"], fit.rows())
    ctx.manifest.add_result(A0=fit.A0, A1=fit.A1, residual=fit.residual, satisfied=fit.satisfied())


def _diagnose_cl1(ctx: RunContext):
    config = ctx.config
    d = config.bmax if config.d is None else config.d
    with ctx.manifest.phase("cl1"):
        report = verify_cl1(config.pmax, config.bmax, d)
        control = verify_cl1(config.pmax, config.bmax, d, base=1.0, c2=report.c2)
    ctx.table("cl1.csv", ["p", "b", "S", "bound", "pass"], report.rows)
    ctx.manifest.add_result(
        all_pass=report.all_pass, c2=report.c2, failures=report.failures, control_failures=control.failures
    )


def _diagnose_curvature(ctx: RunContext):
    u = _solution_or_input(ctx.config)
    with ctx.manifest.phase("curvature"):
        kappa = level_set_curvature(u)
    path = export_field_csv(ctx.path("curvature.csv"), kappa)
    ctx.manifest.add_output(path)
    interior = kappa.values[:-1]
    ctx.manifest.add_result(min_curvature=float(np.min(interior)), max_curvature=float(np.max(interior)))


DIAGNOSE: Dict[str, Callable[[RunContext], None]] = {
    "exponent": _diagnose_exponent,
    "radius": _diagnose_radius,
    "induction": _diagnose_induction,
    "cl1": _diagnose_cl1,
    "curvature": _diagnose_curvature,
}


def run_diagnose(ctx: RunContext):
    DIAGNOSE[ctx.config.what](ctx)


def run_oracle(ctx: RunContext):
    config = ctx.config
    with ctx.manifest.phase("shooting"):
        profile = radial_oracle(config.q, config.mode, config.radius, config.lam, config.method, config.rtol)
    ctx.table("oracle.csv", ["r", "u", "du"], list(zip(profile.r, profile.values, profile.derivative)))
    ctx.summary("oracle_summary.json", profile.to_dict())
    ctx.manifest.add_result(**profile.to_dict())


COMMANDS: Dict[str, Callable[[RunContext], None]] = {
    "solve": run_solve,
    "eigen": run_eigen,
    "flow": run_flow_command,
    "verify-linear": run_verify_linear,
    "transform": run_transform,
    "diagnose": run_diagnose,
    "oracle": run_oracle,
}


def run(config: RunConfig) -> RunManifest:
    """Run one subcommand and write its manifest.

    Args:
        config: Validated run configuration

    Returns:
        RunManifest: Timings, results and the written outputs

    Raises:
        DegmaError: Whatever the dispatched module raises
    """
    workers = resolve_workers(config.threads)
    ctx = RunContext(config, workers)
    ensure_directory(ctx.out_dir)
    logger.info("Running %s with %d workers", config.command, workers)
    COMMANDS[config.command](ctx)
    ctx.manifest.write(ctx.out_dir)
    return ctx.manifest


def report_error(error: DegmaError, out_dir: Optional[str] = None) -> None:
    """JSON error report on stderr, and in the output directory when one is known."""
    payload = error.to_dict()
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    if out_dir:
        try:
            write_json(Path(out_dir) / ERROR_NAME, payload)
        except PersistenceError:
            logger.debug("Could not write %s", ERROR_NAME)


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit status."""
    load_dotenv()
    out_dir = None
    try:
        args = parse_args(argv)
        out_dir = getattr(args, "out_dir", None)
        config = RunConfig.from_args(args)
        out_dir = config.out_dir
        setup_logging(config.verbose)
        ui = TerminalUI()
        ui.display_banner(config.command, config.digest(), resolve_workers(config.threads))
        manifest = run(config)
        ui.display_manifest(manifest)
        return 0
    except DegmaError as error:
        report_error(error, out_dir)
        return error.exit_code
    except OSError as error:
        wrapped = PersistenceError(str(error), {"path": str(error.filename) if error.filename else None})
        report_error(wrapped, out_dir)
        return wrapped.exit_code
