"""Integral functionals of a grid function: the Rayleigh quotient and the energy J."""

import numpy as np

from ..core.errors import DomainError
from ..core.fields import GridFunction
from .newton import negative_power


def physical_det(u: GridFunction) -> np.ndarray:
    """det D^2 u on the physical domain at every node (zero on the boundary ring)."""
    return u.mesh.hessian(u.values).det / u.domain.lambda_factor


def integrate(u: GridFunction, values: np.ndarray) -> float:
    """Quadrature over the physical domain."""
    return u.mesh.integrate(values) * u.domain.area_factor


def rayleigh_lambda(u: GridFunction, q: float) -> float:
    """int (-u) det D^2 u / int (-u)^(q+1).

    Raises:
        DomainError: If the denominator vanishes
    """
    w = np.maximum(-u.values, 0.0)
    denominator = integrate(u, w ** (q + 1))
    if denominator <= 0.0:
        raise DomainError("Rayleigh quotient of a function that is not negative")
    return integrate(u, w * physical_det(u)) / denominator


def functional_J(u: GridFunction, q: float, lam: float = 1.0, n: int = 2) -> float:
    """J(u) = 1/(n+1) int (-u) det D^2 u - lam/(q+1) int |u|^(q+1)."""
    w = np.maximum(-u.values, 0.0)
    energy = integrate(u, w * physical_det(u)) / (n + 1)
    return energy - lam * integrate(u, np.abs(u.values) ** (q + 1)) / (q + 1)


def functional_gradient(u: GridFunction, q: float, lam: float = 1.0) -> np.ndarray:
    """First variation of J: dJ(u)[phi] = int phi (lam (-u)^q - det D^2 u)."""
    g = lam * negative_power(u.values, q) - physical_det(u)
    g[-1] = 0.0
    return g


def directional_derivative(u: GridFunction, q: float, phi: np.ndarray, lam: float = 1.0) -> float:
    return integrate(u, functional_gradient(u, q, lam) * phi)
