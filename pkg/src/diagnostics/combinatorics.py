"""Exact composition sums and the check of the bound they satisfy."""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Union

from ..core.errors import ConfigurationError, PreconditionError

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]

MAX_P = 60
MAX_B = 6
CALIBRATION_P = 10


def part_weight(j: int) -> Fraction:
    """(j-2)+! / j!."""
    return Fraction(math.factorial(max(j - 2, 0)), math.factorial(j))


@lru_cache(maxsize=None)
def _composition_sum(p: int, b: int) -> Fraction:
    if b == 0:
        return part_weight(p)
    return sum((part_weight(j) * _composition_sum(p - j, b - 1) for j in range(p + 1)), Fraction(0))


def _check_range(p: int, b: int):
    if p < 0 or b < 0 or p > MAX_P or b > MAX_B:
        raise ConfigurationError("Composition sums are supported for 0 <= p <= 60, 0 <= b <= 6", {"p": p, "b": b})


def composition_sum(p: int, b: int) -> Fraction:
    """Sum over compositions k_0 + ... + k_b = p of prod (k_i - 2)+! / k_i!."""
    _check_range(p, b)
    return _composition_sum(p, b)


def composition_sum_direct(p: int, b: int) -> Fraction:
    """The same sum by enumerating every composition; only for small p and b."""
    total = Fraction(0)
    for parts in itertools.product(range(p + 1), repeat=b + 1):
        if sum(parts) == p:
            term = Fraction(1)
            for k in parts:
                term *= part_weight(k)
            total += term
    return total


def default_base(d: int) -> float:
    return 8 * math.pi ** 2 * (d + 1)


@dataclass
class CL1Report:
    """Per-(p, b) comparison of S(p, b) with C2 base^(b+1) / (p+1)^2."""

    p_max: int
    b_max: int
    d: int
    base: float
    c2: float
    rows: List[List] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(row[4] for row in self.rows)

    @property
    def failures(self) -> int:
        return sum(1 for row in self.rows if not row[4])

    def to_dict(self) -> Dict:
        return {
            "p_max": self.p_max,
            "b_max": self.b_max,
            "d": self.d,
            "base": self.base,
            "c2": self.c2,
            "all_pass": self.all_pass,
            "failures": self.failures,
        }


def bound_value(c2: Number, base: Number, p: int, b: int) -> Fraction:
    """C2 base^(b+1) / (p+1)^2 as an exact rational; floats enter with their exact binary value."""
    return Fraction(c2) * Fraction(base) ** (b + 1) / (p + 1) ** 2


def calibrate_c2(b_max: int, base: Number, calibration_p: int = CALIBRATION_P) -> Fraction:
    """Least C2 for which the bound holds on p <= calibration_p, exactly."""
    base = Fraction(base)
    return max(
        composition_sum(p, b) * (p + 1) ** 2 / base ** (b + 1)
        for p in range(calibration_p + 1)
        for b in range(b_max + 1)
    )


def verify_cl1(
    p_max: int,
    b_max: int,
    d: int,
    base: Optional[Number] = None,
    c2: Optional[Number] = None,
    calibration_p: int = CALIBRATION_P,
) -> CL1Report:
    """Check S(p, b) <= C2 base^(b+1) / (p+1)^2 for all p <= p_max, b <= b_max.

    The comparison S (p+1)^2 <= C2 base^(b+1) is made in rational arithmetic; the
    S and bound columns of the rows are rounded to floats for the table.

    Args:
        p_max: Largest composition total
        b_max: Largest number of parts minus one
        d: Dimension parameter of the default base 8 pi^2 (d + 1)
        base: Replaces the default base when given
        c2: Fixed constant; calibrated on p <= calibration_p with the given base when absent

    Returns:
        CL1Report: Rows 'p,b,S,bound,pass'

    Raises:
        PreconditionError: If d < b_max
    """
    if d < b_max:
        raise PreconditionError("The bound needs d >= b_max", {"d": d, "b_max": b_max})
    _check_range(p_max, b_max)
    base = default_base(d) if base is None else float(base)
    if c2 is None:
        c2 = calibrate_c2(b_max, base, calibration_p)
    exact_c2 = Fraction(c2)
    report = CL1Report(p_max, b_max, d, base, float(exact_c2))
    for p in range(p_max + 1):
        for b in range(b_max + 1):
            s = composition_sum(p, b)
            bound = bound_value(exact_c2, base, p, b)
            report.rows.append([p, b, float(s), float(bound), s <= bound])
    logger.info("cl1 check p<=%d b<=%d: %d failures, C2=%.6g", p_max, b_max, report.failures, report.c2)
    return report
