"""Convex planar domains handled by the nonlinear solver."""

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .errors import ConfigurationError

DOMAIN_KINDS = ("disc", "ellipse")


@dataclass(frozen=True)
class Domain2D:
    """Disc or ellipse centred at the origin.

    The boundary is parametrized by theta -> (a cos theta, b sin theta).
    """

    kind: str = "disc"
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise ConfigurationError(f"Unknown domain kind '{self.kind}'", {"kind": self.kind})
        if not (self.a > 0 and self.b > 0):
            raise ConfigurationError("Semi-axes must be positive", {"a": self.a, "b": self.b})
        if self.kind == "disc" and self.a != self.b:
            raise ConfigurationError("A disc needs equal semi-axes", {"a": self.a, "b": self.b})

    @classmethod
    def from_axes(cls, a: float, b: float) -> "Domain2D":
        """Build a disc when a == b and an ellipse otherwise."""
        return cls("disc" if a == b else "ellipse", float(a), float(b))

    @property
    def area_factor(self) -> float:
        """Jacobian ab of the map from the unit disc."""
        return self.a * self.b

    @property
    def lambda_factor(self) -> float:
        """Factor (ab)^2 applied to Lambda by the reduction to the unit disc."""
        return (self.a * self.b) ** 2

    def boundary_point(self, theta: float) -> np.ndarray:
        return np.array([self.a * np.cos(theta), self.b * np.sin(theta)])

    def boundary_tangent(self, theta: float) -> np.ndarray:
        """Unit tangent, counter-clockwise."""
        t = np.array([-self.a * np.sin(theta), self.b * np.cos(theta)])
        return t / np.linalg.norm(t)

    def inward_normal(self, theta: float) -> np.ndarray:
        t = self.boundary_tangent(theta)
        return np.array([-t[1], t[0]])

    def curvature(self, theta: float) -> float:
        """Boundary curvature, strictly positive for discs and ellipses."""
        s, c = np.sin(theta), np.cos(theta)
        return self.a * self.b / (self.a ** 2 * s ** 2 + self.b ** 2 * c ** 2) ** 1.5

    def to_reference(self, x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Map physical points to the unit disc."""
        return np.asarray(x) / self.a, np.asarray(y) / self.b

    def from_reference(self, X: np.ndarray, Y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return self.a * np.asarray(X), self.b * np.asarray(Y)

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        X, Y = self.to_reference(x, y)
        return X ** 2 + Y ** 2 <= 1.0

    def to_dict(self) -> Dict:
        return {"kind": self.kind, "a": self.a, "b": self.b}

    @classmethod
    def from_dict(cls, data: Dict) -> "Domain2D":
        return cls(data["kind"], float(data["a"]), float(data["b"]))
