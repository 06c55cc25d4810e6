"""
Wachspress coordinates on strictly convex polygons.

The canonical evaluator is the area-product form
    w_i(x) = B_i * prod_{j != i, i-1} A_j(x),   lambda_i = w_i / sum_j w_j
which is polynomial, finite on the closed polygon and exact at vertices.
The cotangent form (cot(alpha_i) + cot(delta_i)) / |x - v_i|^2 is kept as an
interior-only cross-check.

All work happens on the polygon translated to its vertex centroid and scaled
to unit diameter; coordinates are invariant under that map, weights and
gradients are scaled back on the way out.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Literal, Tuple

import numpy as np

from .errors import BoundaryPoint, DegenerateNormalization, OutsidePolygon
from .geometry import CONVEX_EPS, diameter
from .models import BasisEvaluation, Point2, Polygon, TriangleAreas

Form = Literal["area", "cotangent"]

INTERIOR_EPS = 1e-10   # times diam


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclass(frozen=True, eq=False)
class WachspressBasis:
    """Per-polygon table (B_i, grad A_i) on the unit-diameter copy."""
    polygon: Polygon
    center: np.ndarray = field(init=False, repr=False)
    scale: float = field(init=False)
    unit: np.ndarray = field(init=False, repr=False)    # (n,2) rescaled vertices
    B: np.ndarray = field(init=False, repr=False)       # (n,)
    gradA: np.ndarray = field(init=False, repr=False)   # (n,2)
    _keep: Tuple[np.ndarray, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        xy = self.polygon.coords
        center = xy.mean(axis=0)
        scale = diameter(self.polygon)
        unit = (xy - center) / scale
        prev, nxt = np.roll(unit, 1, axis=0), np.roll(unit, -1, axis=0)
        B = 0.5 * _cross(unit - prev, nxt - unit)
        e = nxt - unit
        gradA = 0.5 * np.column_stack((-e[:, 1], e[:, 0]))
        # Exclusion pattern of the area product: w_i skips A_i and A_(i-1).
        n = len(unit)
        keep = tuple(np.array([j for j in range(n) if j not in (i, (i - 1) % n)]) for i in range(n))
        for name, value in (("center", center), ("scale", scale), ("unit", unit),
                            ("B", B), ("gradA", gradA), ("_keep", keep)):
            if isinstance(value, np.ndarray):
                value.flags.writeable = False
            object.__setattr__(self, name, value)

    @property
    def n(self) -> int:
        return self.polygon.n

    # ----- point handling -----
    def to_unit(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return (pts - self.center) / self.scale

    def areas(self, u: np.ndarray) -> np.ndarray:
        """Signed A_i for unit-frame points u (N,2) -> (N,n)."""
        a = self.unit[None, :, :] - u[:, None, :]
        b = np.roll(self.unit, -1, axis=0)[None, :, :] - u[:, None, :]
        return 0.5 * _cross(a, b)

    def _check_closed(self, A: np.ndarray) -> np.ndarray:
        worst = A.min(axis=1)
        if np.any(worst < -CONVEX_EPS):
            k = int(np.argmin(worst))
            raise OutsidePolygon(f"point #{k} lies outside the polygon (area {float(worst[k])!r})")
        return np.maximum(A, 0.0)

    def _check_interior(self, A: np.ndarray) -> None:
        self._check_closed(A)
        # A_i = 0.5 * |edge_i| * distance to edge line i, all in unit frame
        edge_len = np.linalg.norm(np.roll(self.unit, -1, axis=0) - self.unit, axis=1)
        dist = 2.0 * A / edge_len[None, :]
        worst = dist.min(axis=1)
        if np.any(worst <= INTERIOR_EPS):
            k = int(np.argmin(worst))
            raise BoundaryPoint(
                f"point #{k} is within {INTERIOR_EPS}*diam of the boundary (distance {float(worst[k])!r})"
            )

    # ----- weights -----
    def area_weights(self, u: np.ndarray) -> np.ndarray:
        A = self._check_closed(self.areas(u))
        w = np.empty_like(A)
        for i, idx in enumerate(self._keep):
            w[:, i] = self.B[i] * np.prod(A[:, idx], axis=1)
        return w

    def cot_weights(self, u: np.ndarray) -> np.ndarray:
        self._check_interior(self.areas(u))
        to_x = u[:, None, :] - self.unit[None, :, :]                 # x - v_i
        nxt = (np.roll(self.unit, -1, axis=0) - self.unit)[None]     # v_(i+1) - v_i
        prv = (np.roll(self.unit, 1, axis=0) - self.unit)[None]      # v_(i-1) - v_i
        # cot = dot / cross, both angles measured at v_i
        cot_alpha = np.einsum("nik,nik->ni", np.broadcast_to(nxt, to_x.shape), to_x) / _cross(nxt, to_x)
        cot_delta = np.einsum("nik,nik->ni", np.broadcast_to(prv, to_x.shape), to_x) / _cross(to_x, prv)
        return (cot_alpha + cot_delta) / np.einsum("nik,nik->ni", to_x, to_x)

    # ----- coordinates -----
    def coords(self, u: np.ndarray, form: Form = "area") -> Tuple[np.ndarray, np.ndarray]:
        w = self.area_weights(u) if form == "area" else self.cot_weights(u)
        total = w.sum(axis=1)
        if np.any(~(total > 0)):
            raise DegenerateNormalization("sum of Wachspress weights is not positive")
        return w, w / total[:, None]

    def grads(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        (lambda, grad lambda) at interior unit-frame points, gradients in the
        ORIGINAL frame. With g_i = grad log w_i = sum_{k not in {i,i-1}} gradA_k / A_k
        the product rule collapses to grad lambda_i = lambda_i (g_i - sum_j lambda_j g_j).
        """
        A = self.areas(u)
        self._check_interior(A)
        _, lam = self.coords(u, "area")
        R = self.gradA[None, :, :] / A[:, :, None]                 # (N,n,2)
        g = R.sum(axis=1)[:, None, :] - R - np.roll(R, 1, axis=1)
        mean_g = np.einsum("ni,nik->nk", lam, g)
        grad = lam[:, :, None] * (g - mean_g[:, None, :])
        return lam, grad / self.scale


@lru_cache(maxsize=256)
def basis_for(p: Polygon) -> WachspressBasis:
    return WachspressBasis(p)


# ----- Public API (single points) -----
def _one(x) -> Tuple[Point2, np.ndarray]:
    pt = Point2.of(x)
    return pt, pt.as_array()[None, :]


def triangle_areas(p: Polygon, x) -> TriangleAreas:
    """A_i(x) and B_i in the polygon's own units (no rescaling)."""
    _, xy = _one(x)
    v = p.coords
    nxt, prv = np.roll(v, -1, axis=0), np.roll(v, 1, axis=0)
    A = 0.5 * _cross(v - xy, nxt - xy)
    B = 0.5 * _cross(v - prv, nxt - v)
    e = nxt - v
    gradA = 0.5 * np.column_stack((-e[:, 1], e[:, 0]))
    return TriangleAreas(
        A=tuple(float(a) for a in A),
        B=tuple(float(b) for b in B),
        gradA=tuple((float(gx), float(gy)) for gx, gy in gradA),
    )


def weights_area_form(p: Polygon, x) -> List[float]:
    basis = basis_for(p)
    _, xy = _one(x)
    w = basis.area_weights(basis.to_unit(xy))[0]
    # B and the n-2 areas each carry diam^2
    return [float(v) for v in w * basis.scale ** (2 * (p.n - 1))]


def weights_cotangent_form(p: Polygon, x) -> List[float]:
    basis = basis_for(p)
    _, xy = _one(x)
    w = basis.cot_weights(basis.to_unit(xy))[0]
    return [float(v) for v in w / basis.scale ** 2]


def coordinates(p: Polygon, x, form: Form = "area", with_grads: bool = False) -> BasisEvaluation:
    basis = basis_for(p)
    pt, xy = _one(x)
    u = basis.to_unit(xy)
    w, lam = basis.coords(u, form)
    scale = basis.scale ** (2 * (p.n - 1)) if form == "area" else basis.scale ** -2
    grads = None
    if with_grads:
        _, g = basis.grads(u)
        grads = tuple((float(gx), float(gy)) for gx, gy in g[0])
    return BasisEvaluation(
        point=pt,
        weights=tuple(float(v) for v in w[0] * scale),
        coords=tuple(float(v) for v in lam[0]),
        grads=grads,
    )


def coordinate_gradients(p: Polygon, x) -> List[Tuple[float, float]]:
    basis = basis_for(p)
    _, xy = _one(x)
    _, g = basis.grads(basis.to_unit(xy))
    return [(float(gx), float(gy)) for gx, gy in g[0]]


# ----- Vectorised API (used by quadrature and interpolation) -----
def eval_coords(p: Polygon, pts) -> np.ndarray:
    basis = basis_for(p)
    return basis.coords(basis.to_unit(pts), "area")[1]


def eval_coords_and_grads(p: Polygon, pts) -> Tuple[np.ndarray, np.ndarray]:
    basis = basis_for(p)
    return basis.grads(basis.to_unit(pts))
