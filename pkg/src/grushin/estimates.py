"""A-priori estimate ratios and the algebra constant of the weighted space."""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from ..core.calculus import StripCalculus, sobolev_norm
from ..core.errors import ConfigurationError, DomainError, PreconditionError
from ..core.fields import StripField
from ..core.parallel import ordered_map
from .norms import WeightedNormReport, weighted_norm, weighted_norm_values
from .problem import GrushinProblem
from .sampling import BandLimitedDatum, default_cutoff
from .solver import solve_grushin

logger = logging.getLogger(__name__)

MIN_ALGEBRA_K = 5
ALGEBRA_FIT_DEGREE = 12


@dataclass
class RatioRecord:
    """One estimate-ratio evaluation, as written to the results table."""

    case: str
    ratio: float
    h: float
    report: WeightedNormReport
    data_norm: float

    def to_row(self) -> Dict:
        row = {"case": self.case, "ratio": self.ratio, "h": self.h}
        row.update(self.report.components)
        row["data_norm"] = self.data_norm
        return row


def _data_norm(p: GrushinProblem, k: int, vertical: str) -> float:
    return sobolev_norm(p.f, k, vertical) + sobolev_norm(p.g, k + 1)


def ratio_record(p: GrushinProblem, k: int, vertical: str = "fd", case: str = "", workers: int = 1) -> RatioRecord:
    """Solve p and compare the weighted norm of the solution to the data norm.

    Raises:
        DomainError: If f and g are both zero
    """
    if p.is_zero():
        raise DomainError("Estimate ratio needs nonzero data (f, g)")
    denominator = _data_norm(p, k, vertical)
    if denominator <= 0.0:
        raise DomainError("Data norm vanishes", {"k": k})
    u = solve_grushin(p, workers)
    report = weighted_norm(u, k, p.m, vertical)
    return RatioRecord(case, report.total / denominator, 1.0 / p.vertical, report, denominator)


def estimate_ratio(p: GrushinProblem, k: int, vertical: str = "fd", workers: int = 1) -> float:
    """||solve(p)||_W / (||f||_{H^k} + ||g||_{H^{k+1}})."""
    return ratio_record(p, k, vertical, workers=workers).ratio


def sample_seeds(seed: int, samples: int) -> List[int]:
    """Per-sample seeds derived from one master seed."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(samples)]


def ratio_ensemble(
    m: int,
    k: int,
    modes: int,
    vertical: int,
    samples: int,
    seed: int,
    grid: str = "fd",
    cutoff: Optional[int] = None,
    workers: int = 1,
) -> List[RatioRecord]:
    """Estimate ratios over a seeded ensemble of band-limited data.

    The i-th datum depends only on (seed, i), so the same ensemble can be resampled at
    another resolution by passing the same seed.
    """
    if samples < 1:
        raise ConfigurationError("Need at least one sample", {"samples": samples})
    cutoff = default_cutoff(modes) if cutoff is None else cutoff

    def one(item):
        index, s = item
        p = BandLimitedDatum.draw(s, cutoff).problem(m, modes, vertical)
        return ratio_record(p, k, grid, case=f"random-{index}")

    records = ordered_map(one, list(enumerate(sample_seeds(seed, samples))), workers)
    logger.info("Ratio ensemble: %d samples, max ratio %.6g", samples, max(r.ratio for r in records))
    return records


def algebra_ratio(u: StripField, v: StripField, k: int, m: int = 1, degree: int = ALGEBRA_FIT_DEGREE) -> float:
    """||uv|| / (||u|| ||v||) in the weighted norm with Chebyshev vertical derivatives.

    Raises:
        DomainError: If either factor has zero norm
    """
    calc = StripCalculus(u.values.shape, u.period, "chebyshev", degree)
    nu = weighted_norm_values(u.values, calc, k, m).total
    nv = weighted_norm_values(v.values, calc, k, m).total
    if nu <= 0.0 or nv <= 0.0:
        raise DomainError("Algebra ratio needs factors of nonzero norm", {"norm_u": nu, "norm_v": nv})
    return weighted_norm_values(u.values * v.values, calc, k, m).total / (nu * nv)


def algebra_ratios(
    k: int,
    samples: int,
    seed: int,
    m: int = 1,
    modes: int = 32,
    vertical: int = 64,
    degree: int = ALGEBRA_FIT_DEGREE,
    workers: int = 1,
) -> List[float]:
    """Per-pair algebra ratios of a seeded ensemble.

    Raises:
        PreconditionError: If k < 5
    """
    if k < MIN_ALGEBRA_K:
        raise PreconditionError("The algebra property needs k >= n + 3 = 5", {"k": k})
    if samples < 1:
        raise ConfigurationError("Need at least one sample", {"samples": samples})
    if vertical < degree:
        raise ConfigurationError("Vertical grid too coarse for the fit degree", {"vertical": vertical, "degree": degree})
    cutoff = default_cutoff(modes) // 2
    seeds = sample_seeds(seed, 2 * samples)
    datum_degree = degree // 3

    def one(index: int) -> float:
        u = BandLimitedDatum.draw(seeds[2 * index], cutoff, datum_degree).field(modes, vertical)
        v = BandLimitedDatum.draw(seeds[2 * index + 1], cutoff, datum_degree).field(modes, vertical)
        return algebra_ratio(u, v, k, m, degree)

    return ordered_map(one, list(range(samples)), workers)


def algebra_constant(k: int, samples: int, seed: int, **kwargs) -> float:
    """Largest observed ||uv|| / (||u|| ||v||) over random smooth pairs.

    Args:
        k: Differentiability index, k >= 5
        samples: Number of pairs
        seed: Master seed
        **kwargs: Passed to ``algebra_ratios`` (m, modes, vertical, degree, workers)

    Returns:
        float: The maximum ratio
    """
    ratios = algebra_ratios(k, samples, seed, **kwargs)
    constant = float(max(ratios))
    logger.info("Algebra constant k=%d over %d pairs: %.6g", k, samples, constant)
    return constant
