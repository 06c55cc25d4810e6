# app/models.py
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import NonFiniteInput, SingularMap

Array = np.ndarray
PointsFn = Callable[[Array], Array]


# ----------------------------
# Geometry
# ----------------------------
@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise NonFiniteInput(f"non-finite point ({self.x!r}, {self.y!r})")

    @classmethod
    def of(cls, xy) -> "Point2":
        if isinstance(xy, Point2):
            return xy
        x, y = xy
        return cls(float(x), float(y))

    def as_array(self) -> Array:
        return np.array([self.x, self.y], dtype=float)


@dataclass(frozen=True, eq=False)
class Polygon:
    """
    Convex polygon, vertices v1..vn counterclockwise. Build it with
    geometry.validate_polygon; the constructor itself trusts its input.
    Index arithmetic is cyclic (v0 = vn, v(n+1) = v1).
    """
    vertices: Tuple[Point2, ...]
    coords: Array = field(init=False, repr=False)

    def __post_init__(self) -> None:
        arr = np.array([[v.x, v.y] for v in self.vertices], dtype=float)
        arr.flags.writeable = False
        object.__setattr__(self, "coords", arr)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def vertex(self, i: int) -> Point2:
        return self.vertices[i % self.n]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polygon):
            return NotImplemented
        return self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)


@dataclass(frozen=True)
class AffineMap:
    """x -> linear @ x + translation."""
    linear: Tuple[Tuple[float, float], Tuple[float, float]]
    translation: Point2 = Point2(0.0, 0.0)

    @property
    def matrix(self) -> Array:
        return np.array(self.linear, dtype=float)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def apply(self, pts: Array) -> Array:
        pts = np.asarray(pts, dtype=float)
        return pts @ self.matrix.T + self.translation.as_array()

    def inverse(self) -> "AffineMap":
        if abs(self.det) == 0.0:
            raise SingularMap("affine map has a singular linear part")
        inv = np.linalg.inv(self.matrix)
        t = -inv @ self.translation.as_array()
        return AffineMap(
            linear=((float(inv[0, 0]), float(inv[0, 1])), (float(inv[1, 0]), float(inv[1, 1]))),
            translation=Point2(float(t[0]), float(t[1])),
        )

    @classmethod
    def rotation(cls, theta: float) -> "AffineMap":
        c, s = math.cos(theta), math.sin(theta)
        return cls(((c, -s), (s, c)))

    @classmethod
    def scaling(cls, h: float) -> "AffineMap":
        return cls(((h, 0.0), (0.0, h)))


@dataclass(frozen=True)
class GeometricReport:
    diam: float
    rho: float
    sigma: float
    d_m: float
    psi_M: float
    psi_m: float
    angles: Tuple[float, ...]
    area: float


@dataclass(frozen=True)
class Thresholds:
    sigma_max: float
    d_m_min: float
    psi_m_min: float
    psi_M_max: float


@dataclass(frozen=True)
class ConditionVerdict:
    barp_holds: bool
    melp_holds: bool
    mac_holds: bool
    MAC_holds: bool


# ----------------------------
# Wachspress
# ----------------------------
@dataclass(frozen=True)
class TriangleAreas:
    A: Tuple[float, ...]       # |x v_i v_(i+1)|, signed
    B: Tuple[float, ...]       # |v_(i-1) v_i v_(i+1)|
    gradA: Tuple[Tuple[float, float], ...]


@dataclass(frozen=True)
class BasisEvaluation:
    point: Point2
    weights: Tuple[float, ...]
    coords: Tuple[float, ...]
    grads: Optional[Tuple[Tuple[float, float], ...]] = None


# ----------------------------
# Quadrature
# ----------------------------
@dataclass(frozen=True, eq=False)
class TriangleRule:
    degree: int
    nodes: Array      # (q, 3) barycentric
    weights: Array    # (q,), sums to 1


@dataclass(frozen=True)
class IntegrationResult:
    value: float
    error_estimate: float
    cells_used: int


# ----------------------------
# Interpolation error
# ----------------------------
@dataclass(frozen=True)
class ScalarField:
    """u with analytic derivatives; every callable maps (N,2) points to arrays."""
    value: PointsFn                      # -> (N,)
    gradient: PointsFn                   # -> (N,2)
    hessian: Optional[PointsFn] = None   # -> (N,2,2)
    label: str = "u"

    def __call__(self, pts: Array) -> Array:
        return self.value(np.atleast_2d(np.asarray(pts, dtype=float)))


@dataclass(frozen=True)
class ErrorReport:
    l2_error: float
    h1_semi_error: float
    h1_error: float
    h2_semi: float
    diam: float
    ratio: Optional[float]        # h1_error / (diam * h2_semi); None when u is affine
    semi_ratio: Optional[float]   # h1_semi_error / (diam * h2_semi)


# ----------------------------
# Experiments
# ----------------------------
class Family(str, Enum):
    CEX1 = "cex1"
    CEX2 = "cex2"
    F1 = "f1"
    F2 = "f2"
    RECT = "rect"
    BENIGN_SQUARE = "benign-square"
    BENIGN_NGON = "benign-ngon"


@dataclass(frozen=True)
class FamilySpec:
    family: Family
    s_values: Tuple[float, ...]
    function: str
    sides: int = 6


@dataclass
class SweepRecord:
    s: float
    diam: Optional[float] = None
    sigma: Optional[float] = None
    d_m: Optional[float] = None
    psi_M: Optional[float] = None
    psi_m: Optional[float] = None
    l2_error: Optional[float] = None
    h1_semi_error: Optional[float] = None
    h1_error: Optional[float] = None
    h2_semi: Optional[float] = None
    ratio: Optional[float] = None
    paper_lower_bound: Optional[float] = None
    error: Optional[str] = None


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float


SWEEP_COLUMNS: List[str] = [
    "s", "diam", "sigma", "d_m", "psi_M", "psi_m",
    "l2_error", "h1_semi_error", "h1_error", "h2_semi", "ratio", "paper_lower_bound",
]
