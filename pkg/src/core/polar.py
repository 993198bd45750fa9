"""Fitted polar mesh on the reference disc and its discrete Hessian."""

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Tuple

import numpy as np
from scipy import sparse

from .errors import ConfigurationError


@dataclass(frozen=True)
class HessianParts:
    """Polar-frame Hessian components at every node."""

    rr: np.ndarray
    tt: np.ndarray
    rt: np.ndarray

    @property
    def det(self) -> np.ndarray:
        return self.rr * self.tt - self.rt ** 2


class PolarMesh:
    """Rings r_i = (i + 1/2) dr with dr = 1 / (N_r - 1/2); the last ring is r = 1.

    The inward neighbour of ring 0 is its mirror image across the centre, node
    (0, j + N_theta / 2), so every interior node has a full 9-point stencil.
    """

    def __init__(self, n_r: int, n_theta: int):
        if n_r < 8 or n_theta < 8 or n_theta % 2:
            raise ConfigurationError("Need N_r >= 8 and an even N_theta >= 8", {"n_r": n_r, "n_theta": n_theta})
        self.n_r = n_r
        self.n_theta = n_theta
        self.dr = 1.0 / (n_r - 0.5)
        self.dtheta = 2 * np.pi / n_theta
        self.r = (np.arange(n_r) + 0.5) * self.dr
        self.theta = np.arange(n_theta) * self.dtheta

    @staticmethod
    @lru_cache(maxsize=16)
    def create(n_r: int, n_theta: int) -> "PolarMesh":
        return PolarMesh(n_r, n_theta)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n_r, self.n_theta)

    @property
    def size(self) -> int:
        return self.n_r * self.n_theta

    @cached_property
    def R(self) -> np.ndarray:
        return np.repeat(self.r[:, None], self.n_theta, axis=1)

    @cached_property
    def T(self) -> np.ndarray:
        return np.repeat(self.theta[None, :], self.n_r, axis=0)

    @cached_property
    def X(self) -> np.ndarray:
        return self.R * np.cos(self.T)

    @cached_property
    def Y(self) -> np.ndarray:
        return self.R * np.sin(self.T)

    @cached_property
    def interior(self) -> np.ndarray:
        """Flat indices of the unknown (non-boundary) nodes."""
        return np.arange((self.n_r - 1) * self.n_theta)

    @cached_property
    def interior_mask(self) -> np.ndarray:
        mask = np.ones(self.shape, dtype=bool)
        mask[-1] = False
        return mask

    def _neighbour(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        half = self.n_theta // 2
        below = i < 0
        ii = np.where(below, -i - 1, i)
        jj = np.where(below, j + half, j) % self.n_theta
        return ii * self.n_theta + jj

    def _stencil(self, offsets):
        """Sparse operator sum_k w_k u(i + di_k, j + dj_k) on interior rows."""
        i, j = np.meshgrid(np.arange(self.n_r - 1), np.arange(self.n_theta), indexing="ij")
        i, j = i.ravel(), j.ravel()
        rows = i * self.n_theta + j
        all_rows, all_cols, all_vals = [], [], []
        for di, dj, w in offsets:
            all_rows.append(rows)
            all_cols.append(self._neighbour(i + di, j + dj))
            all_vals.append(np.full(rows.shape, w))
        return sparse.csr_matrix(
            (np.concatenate(all_vals), (np.concatenate(all_rows), np.concatenate(all_cols))),
            shape=(self.size, self.size),
        )

    @cached_property
    def D_r(self) -> sparse.csr_matrix:
        h = self.dr
        return self._stencil([(1, 0, 1 / (2 * h)), (-1, 0, -1 / (2 * h))])

    @cached_property
    def D_rr(self) -> sparse.csr_matrix:
        h2 = self.dr ** 2
        return self._stencil([(1, 0, 1 / h2), (0, 0, -2 / h2), (-1, 0, 1 / h2)])

    @cached_property
    def D_t(self) -> sparse.csr_matrix:
        k = self.dtheta
        return self._stencil([(0, 1, 1 / (2 * k)), (0, -1, -1 / (2 * k))])

    @cached_property
    def D_tt(self) -> sparse.csr_matrix:
        k2 = self.dtheta ** 2
        return self._stencil([(0, 1, 1 / k2), (0, 0, -2 / k2), (0, -1, 1 / k2)])

    @cached_property
    def D_rt(self) -> sparse.csr_matrix:
        w = 1 / (4 * self.dr * self.dtheta)
        return self._stencil([(1, 1, w), (1, -1, -w), (-1, 1, -w), (-1, -1, w)])

    @cached_property
    def inv_r(self) -> sparse.dia_matrix:
        return sparse.diags(1.0 / self.R.ravel())

    @cached_property
    def inv_r2(self) -> sparse.dia_matrix:
        return sparse.diags(1.0 / self.R.ravel() ** 2)

    @cached_property
    def A_tt(self) -> sparse.csr_matrix:
        """Operator u -> u_r / r + u_tt / r^2."""
        return (self.inv_r @ self.D_r + self.inv_r2 @ self.D_tt).tocsr()

    @cached_property
    def A_rt(self) -> sparse.csr_matrix:
        """Operator u -> u_rt / r - u_t / r^2."""
        return (self.inv_r @ self.D_rt - self.inv_r2 @ self.D_t).tocsr()

    def hessian(self, values: np.ndarray) -> HessianParts:
        """Polar-frame Hessian of reference-disc values (zero on the boundary ring)."""
        u = np.asarray(values, dtype=float).ravel()
        shape = self.shape
        return HessianParts(
            (self.D_rr @ u).reshape(shape),
            (self.A_tt @ u).reshape(shape),
            (self.A_rt @ u).reshape(shape),
        )

    def det_jacobian(self, values: np.ndarray) -> sparse.csr_matrix:
        """Derivative of the discrete determinant with respect to the nodal values."""
        H = self.hessian(values)
        return (
            sparse.diags(H.tt.ravel()) @ self.D_rr
            + sparse.diags(H.rr.ravel()) @ self.A_tt
            - 2.0 * sparse.diags(H.rt.ravel()) @ self.A_rt
        ).tocsr()

    def gradient(self, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Polar-frame gradient (u_r, u_theta / r)."""
        u = np.asarray(values, dtype=float).ravel()
        g_r = (self.D_r @ u).reshape(self.shape)
        g_t = (self.D_t @ u).reshape(self.shape) / self.R
        return g_r, g_t

    @cached_property
    def radial_weights(self) -> np.ndarray:
        """Trapezoid weights for int_0^1 g(r) dr, including the segment [0, r_0] with g(0) = 0."""
        w = np.full(self.n_r, self.dr)
        w[0] = 0.75 * self.dr
        w[-1] = 0.5 * self.dr
        return w

    @cached_property
    def area_weights(self) -> np.ndarray:
        """Quadrature weights r dr dtheta on the reference disc."""
        return (self.radial_weights * self.r)[:, None] * np.full(self.n_theta, self.dtheta)[None, :]

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(self.area_weights * values))
