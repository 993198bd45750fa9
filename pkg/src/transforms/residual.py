"""Residual of the partial-Legendre form lam z_n^m (-v*_n)^(n+2) det D^2_{z'} v* + v*_nn = 0."""

from typing import Dict

import numpy as np

from ..core.errors import ConfigurationError, SignError
from .patch import PatchField


def cofactor_matrix(hessian: np.ndarray) -> np.ndarray:
    """Cofactor matrix U^{ij} of a 1x1 or 2x2 tangential Hessian.

    Stacked inputs of shape (..., k, k) are supported.
    """
    hessian = np.asarray(hessian, dtype=float)
    k = hessian.shape[-1]
    if hessian.shape[-2] != k or k not in (1, 2):
        raise ConfigurationError("Cofactors are implemented for 1x1 and 2x2 matrices", {"shape": list(hessian.shape)})
    if k == 1:
        return np.ones_like(hessian)
    out = np.empty_like(hessian)
    out[..., 0, 0] = hessian[..., 1, 1]
    out[..., 1, 1] = hessian[..., 0, 0]
    out[..., 0, 1] = -hessian[..., 1, 0]
    out[..., 1, 0] = -hessian[..., 0, 1]
    return out


def tangential_determinant(hessian: np.ndarray) -> np.ndarray:
    """det via the cofactor expansion along the first row."""
    cof = cofactor_matrix(hessian)
    return np.einsum("...j,...j->...", hessian[..., 0, :], cof[..., 0, :])


def pl_residual_field(v_star: PatchField, m: int, lam: float = 1.0, n: int = 2) -> Dict[str, np.ndarray]:
    """Pointwise residual at the interior nodes [1:-1, 1:-1] with second-order differences.

    Raises:
        SignError: If v*_n >= 0 at an interior node
    """
    if m < 1:
        raise ConfigurationError("Degeneracy exponent must be positive", {"m": m})
    V = v_star.values
    if V.shape[0] < 3 or V.shape[1] < 3:
        raise ConfigurationError("Patch too small for second differences", {"shape": list(V.shape)})
    h1, hn = v_star.h1, v_star.hn
    zn = v_star.xn[1:-1, None]
    v_n = (V[2:, 1:-1] - V[:-2, 1:-1]) / (2 * hn)
    v_nn = (V[2:, 1:-1] - 2 * V[1:-1, 1:-1] + V[:-2, 1:-1]) / hn ** 2
    v_11 = (V[1:-1, 2:] - 2 * V[1:-1, 1:-1] + V[1:-1, :-2]) / h1 ** 2
    if np.any(v_n >= 0.0):
        raise SignError("v*_n must be negative in the patch", {"max_v_n": float(np.max(v_n))})
    det = tangential_determinant(v_11[..., None, None])
    residual = lam * zn ** m * (-v_n) ** (n + 2) * det + v_nn
    return {"residual": residual, "v_n": v_n, "v_nn": v_nn, "v_11": v_11}


def pl_residual(v_star: PatchField, m: int, lam: float = 1.0) -> float:
    """Max over interior patch nodes of |lam z_n^m (-v*_n)^4 v*_11 + v*_nn|."""
    return float(np.max(np.abs(pl_residual_field(v_star, m, lam)["residual"])))
