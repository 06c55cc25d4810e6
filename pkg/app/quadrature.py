# app/quadrature.py
from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import CellCapExceeded, InvalidTolerance, NonFiniteSample
from .geometry import polygon_area
from .models import IntegrationResult, Point2, Polygon, TriangleRule
from .settings import get_settings

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]

BASE_DEGREE = 10
MARK_FRACTION = 0.5


# ----- Rules -----
@lru_cache(maxsize=16)
def collapsed_gauss_rule(degree: int = BASE_DEGREE) -> TriangleRule:
    """
    Gauss-Legendre x Gauss-Jacobi(1,0) product rule collapsed onto the
    triangle (0,0),(1,0),(0,1); m points per axis are exact through total
    degree 2m-1. Nodes are returned barycentric, weights sum to 1.
    """
    m = max(1, (degree + 2) // 2)
    xl, wl = roots_legendre(m)
    xj, wj = roots_jacobi(m, 1.0, 0.0)
    s = (xl + 1.0) / 2.0
    t = (xj + 1.0) / 2.0
    T, S = np.meshgrid(t, s, indexing="ij")
    x = T.ravel()
    y = ((1.0 - T) * S).ravel()
    w = np.outer(wj, wl).ravel() / 4.0
    nodes = np.column_stack((1.0 - x - y, x, y))
    nodes.flags.writeable = False
    w.flags.writeable = False
    return TriangleRule(degree=2 * m - 1, nodes=nodes, weights=w)


def _tri_areas(tris: np.ndarray) -> np.ndarray:
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    return 0.5 * np.abs((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def apply_rule(tris: np.ndarray, f: Integrand, rule: TriangleRule) -> np.ndarray:
    """Rule estimate of the integral of f over each triangle of tris (M,3,2)."""
    pts = np.einsum("qk,mkd->mqd", rule.nodes, tris)
    vals = np.asarray(f(pts.reshape(-1, 2)), dtype=float).reshape(len(tris), -1)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteSample("integrand returned a non-finite value at a quadrature node")
    return _tri_areas(tris) * (vals @ rule.weights)


def split4(tris: np.ndarray) -> np.ndarray:
    """Midpoint refinement; (M,3,2) -> (4M,3,2), children of a cell stay adjacent."""
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    ab, bc, ca = (a + b) / 2.0, (b + c) / 2.0, (c + a) / 2.0
    kids = np.stack((
        np.stack((a, ab, ca), axis=1),
        np.stack((ab, b, bc), axis=1),
        np.stack((ca, bc, c), axis=1),
        np.stack((ab, bc, ca), axis=1),
    ), axis=1)
    return kids.reshape(-1, 3, 2)


# ----- Fan -----
def _fan(p: Polygon) -> np.ndarray:
    xy = p.coords
    c = xy.mean(axis=0)
    nxt = np.roll(xy, -1, axis=0)
    return np.stack((np.broadcast_to(c, xy.shape), xy, nxt), axis=1)


def triangulate_fan(p: Polygon) -> List[Tuple[Point2, Point2, Point2]]:
    """n triangles (centroid, v_i, v_(i+1))."""
    return [
        tuple(Point2(float(x), float(y)) for x, y in tri)  # type: ignore[misc]
        for tri in _fan(p)
    ]


# ----- Adaptive integration -----
class _Cells:
    """Cell table: triangles with coarse value, refined value and 4 child values."""
    def __init__(self, tris: np.ndarray, coarse: np.ndarray, f: Integrand, rule: TriangleRule) -> None:
        kids = split4(tris)
        child_vals = apply_rule(kids, f, rule).reshape(-1, 4)
        self.tris = tris
        self.coarse = coarse
        self.child_vals = child_vals
        self.fine = child_vals.sum(axis=1)
        self.err = np.abs(self.coarse - self.fine)

    def __len__(self) -> int:
        return len(self.tris)

    def refine(self, marked: np.ndarray, f: Integrand, rule: TriangleRule) -> None:
        keep = np.ones(len(self), dtype=bool)
        keep[marked] = False
        new = _Cells(split4(self.tris[marked]), self.child_vals[marked].ravel(), f, rule)
        self.tris = np.concatenate((self.tris[keep], new.tris))
        self.coarse = np.concatenate((self.coarse[keep], new.coarse))
        self.child_vals = np.concatenate((self.child_vals[keep], new.child_vals))
        self.fine = np.concatenate((self.fine[keep], new.fine))
        self.err = np.concatenate((self.err[keep], new.err))

    def totals(self) -> Tuple[float, float]:
        return math.fsum(self.fine.tolist()), math.fsum(self.err.tolist())


def integrate(
    p: Polygon,
    f: Integrand,
    tol: Optional[float] = None,
    *,
    atol: Optional[float] = None,
    cell_cap: Optional[int] = None,
    rule: Optional[TriangleRule] = None,
) -> IntegrationResult:
    """
    Adaptive integral of a vectorised integrand f((N,2)) -> (N,) over p.

    Starts from the centroid fan; each cell carries |coarse - 4-child| as its
    error. Every pass splits the largest-error cells (at least the worst one)
    until they hold half of the global estimate. Stops once the estimate is
    below max(tol*|value|, atol); raises CellCapExceeded otherwise.
    """
    S = get_settings()
    tol = S.tol if tol is None else tol
    if not tol > 0:
        raise InvalidTolerance(f"tol must be positive, got {tol!r}")
    cap = S.cell_cap if cell_cap is None else cell_cap
    rule = rule or collapsed_gauss_rule()
    atol = 1e-14 * abs(polygon_area(p)) if atol is None else atol

    tris = _fan(p).copy()
    cells = _Cells(tris, apply_rule(tris, f, rule), f, rule)
    value, estimate = cells.totals()
    passes = 0
    while estimate > max(tol * abs(value), atol):
        order = np.argsort(-cells.err, kind="stable")
        cum = np.cumsum(cells.err[order])
        n_mark = int(np.searchsorted(cum, MARK_FRACTION * cum[-1])) + 1
        n_mark = max(1, min(n_mark, (cap - len(cells)) // 3))
        if len(cells) + 3 * n_mark > cap:
            logger.warning("cell cap %d hit: value=%.12g estimate=%.3g", cap, value, estimate)
            raise CellCapExceeded(value, estimate, len(cells))
        cells.refine(np.sort(order[:n_mark]), f, rule)
        value, estimate = cells.totals()
        passes += 1
        logger.debug("pass %d: cells=%d value=%.15g estimate=%.3g", passes, len(cells), value, estimate)

    return IntegrationResult(value=value, error_estimate=estimate, cells_used=len(cells))


def integrate_triangle(tri, f: Integrand, rule: Optional[TriangleRule] = None) -> float:
    """Single fixed-rule pass over one triangle (no adaptivity)."""
    t = np.asarray(tri, dtype=float).reshape(1, 3, 2)
    return float(apply_rule(t, f, rule or collapsed_gauss_rule())[0])
