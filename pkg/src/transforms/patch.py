"""Fields on a rectangular patch of the boundary half-ball."""

from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from ..core.calculus import PatchCalculus
from ..core.errors import ConfigurationError, DomainError
from .frame import BoundaryFrame

PATCH_KINDS = ("v", "v*", "field")


@dataclass
class PatchField:
    """Values on the tensor grid x1 x xn of a patch, vertical index outer.

    For kind "v" the axes are (y1, y_n); for kind "v*" they are (z1, z_n) with z_n = y_n.

    Args:
        x1: Horizontal axis, uniform and increasing
        xn: Vertical axis, uniform, starting at 0
        values: len(xn) x len(x1) array
        kind: "v", "v*" or "field"
        delta: Patch radius
        frame: Boundary frame the patch lives in, if any
        metadata: Extra JSON-friendly information
    """

    x1: np.ndarray
    xn: np.ndarray
    values: np.ndarray
    kind: str = "field"
    delta: float = 0.0
    frame: Optional[BoundaryFrame] = None
    metadata: Dict = field(default_factory=dict)

    def __post_init__(self):
        self.x1 = np.asarray(self.x1, dtype=float)
        self.xn = np.asarray(self.xn, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.kind not in PATCH_KINDS:
            raise ConfigurationError(f"Unknown patch kind '{self.kind}'", {"kind": self.kind})
        if self.values.shape != (len(self.xn), len(self.x1)):
            raise ConfigurationError(
                "Patch values must be len(xn) x len(x1)",
                {"shape": list(self.values.shape), "x1": len(self.x1), "xn": len(self.xn)},
            )
        if self.xn[0] < 0.0:
            raise ConfigurationError("Patch grids cover the y_n >= 0 side only", {"xn0": float(self.xn[0])})
        if not np.all(np.isfinite(self.values)):
            raise DomainError("Patch field has non-finite values")

    @property
    def h1(self) -> float:
        return float(self.x1[1] - self.x1[0])

    @property
    def hn(self) -> float:
        return float(self.xn[1] - self.xn[0])

    def calculus(self, degree: int = 16) -> PatchCalculus:
        return PatchCalculus(self.x1, self.xn, degree)

    def row(self, i: int) -> np.ndarray:
        return self.values[i]

    def metadata_dict(self) -> Dict:
        return {
            "x1": self.x1.tolist(),
            "xn": self.xn.tolist(),
            "patch_kind": self.kind,
            "delta": self.delta,
            "frame": self.frame.to_dict() if self.frame is not None else None,
            "metadata": self.metadata,
        }

    @classmethod
    def from_metadata(cls, values: np.ndarray, meta: Dict) -> "PatchField":
        frame = BoundaryFrame.from_dict(meta["frame"]) if meta.get("frame") else None
        return cls(
            np.asarray(meta["x1"]),
            np.asarray(meta["xn"]),
            values,
            meta.get("patch_kind", "field"),
            float(meta.get("delta", 0.0)),
            frame,
            dict(meta.get("metadata", {})),
        )

    @classmethod
    def from_function(cls, func, x1: np.ndarray, xn: np.ndarray, kind: str = "field", **kwargs) -> "PatchField":
        """Sample func(x1, xn) on the tensor grid."""
        X1, XN = np.meshgrid(x1, xn)
        return cls(x1, xn, np.broadcast_to(func(X1, XN), X1.shape).copy(), kind, **kwargs)
