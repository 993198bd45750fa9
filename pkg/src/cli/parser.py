"""Argument parsing for the degma command line."""

import argparse
from typing import List, Optional

from ..core.errors import FlagError, UnknownCommandError
from .config import COMMANDS, DIAGNOSTICS


class DegmaArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting."""

    def error(self, message):
        if "invalid choice" in message and "command" in message:
            raise UnknownCommandError(message, {"known": list(COMMANDS)})
        raise FlagError(message)


def parse_axes(text: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a,b got '{text}'")
    if len(values) == 1:
        values = values * 2
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected a,b got '{text}'")
    return values


def _add_global(parser: argparse.ArgumentParser):
    parser.add_argument("--out-dir", dest="out_dir", help="Output directory")
    parser.add_argument("--threads", type=int, help="Worker count (DEGMA_THREADS overrides)")
    parser.add_argument("--seed", type=int, help="Master seed")
    parser.add_argument("--config", help="JSON config file; flags given here override it")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")


def _add_mesh(parser: argparse.ArgumentParser):
    parser.add_argument("--domain", type=parse_axes, help="Semi-axes a,b (a single value gives a disc)")
    parser.add_argument("--nr", type=int, help="Radial mesh points")
    parser.add_argument("--ntheta", type=int, help="Angular mesh points (even)")


def build_parser() -> argparse.ArgumentParser:
    parser = DegmaArgumentParser(
        prog="degma",
        description="Numerical lab for degenerate Monge-Ampere equations.",
        argument_default=argparse.SUPPRESS,
    )
    _add_global(parser)
    sub = parser.add_subparsers(dest="command", parser_class=DegmaArgumentParser)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, argument_default=argparse.SUPPRESS)
        _add_global(p)
        return p

    solve = command("solve", "Dirichlet problem det D^2 u = lambda (-u)^q")
    solve.add_argument("--q", type=float)
    solve.add_argument("--lambda", dest="lam", type=float)
    _add_mesh(solve)
    solve.add_argument("--tol", type=float)
    solve.add_argument("--max-iter", dest="max_iter", type=int)

    eigen = command("eigen", "Eigenvalue problem det D^2 u = lambda (-u)^2")
    _add_mesh(eigen)
    eigen.add_argument("--tol", type=float)
    eigen.add_argument("--max-iter", dest="max_iter", type=int)

    flow = command("flow", "Logarithmic gradient flow")
    flow.add_argument("--q", type=float)
    flow.add_argument("--lambda", dest="lam", type=float)
    _add_mesh(flow)
    flow.add_argument("--dt", type=float)
    flow.add_argument("--steps", type=int)
    flow.add_argument("--scheme", choices=("explicit", "linearly-implicit"))
    flow.add_argument("--residual-stop", dest="residual_stop", type=float)
    flow.add_argument("--input", help="Initial iterate dump")

    linear = command("verify-linear", "Estimate ratios of the degenerate linear model")
    linear.add_argument("--m", type=int)
    linear.add_argument("--k", type=int)
    linear.add_argument("--modes", type=int)
    linear.add_argument("--vertical", type=int)
    linear.add_argument("--samples", type=int)
    linear.add_argument("--grid", choices=("fd", "chebyshev"))
    linear.add_argument("--algebra", action="store_true", help="Also sample the product estimate")

    transform = command("transform", "Hodograph and partial Legendre transforms of a solution dump")
    transform.add_argument("--input")
    transform.add_argument("--point", type=float, help="Boundary parameter theta")
    transform.add_argument("--delta", type=float)
    transform.add_argument("--m", type=int)

    diagnose = command("diagnose", "Exponent, radius, induction, cl1 and curvature diagnostics")
    diagnose.add_argument("--input")
    diagnose.add_argument("--what", choices=DIAGNOSTICS)
    diagnose.add_argument("--qmax", type=int)
    diagnose.add_argument("--q", type=float)
    diagnose.add_argument("--Nmax", dest="n_max", type=int)
    diagnose.add_argument("--k", type=int)
    diagnose.add_argument("--m", type=int)
    diagnose.add_argument("--r", type=float, help="Cutoff plateau radius")
    diagnose.add_argument("--delta", type=float)
    diagnose.add_argument("--point", type=float)
    diagnose.add_argument("--pmax", type=int)
    diagnose.add_argument("--bmax", type=int)
    diagnose.add_argument("--d", type=int)
    _add_mesh(diagnose)

    oracle = command("oracle", "Radial shooting oracle")
    oracle.add_argument("--q", type=float)
    oracle.add_argument("--mode", choices=("dirichlet", "eigen"))
    oracle.add_argument("--R", dest="radius", type=float)
    oracle.add_argument("--lambda", dest="lam", type=float)
    oracle.add_argument("--method")
    oracle.add_argument("--rtol", type=float)
    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)
