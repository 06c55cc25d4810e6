# app/geometry.py
from __future__ import annotations

import logging
import math
from typing import Iterable, List, Tuple

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DuplicateVertex,
    InvalidThreshold,
    NonConvex,
    SingularMap,
    TooFewVertices,
)
from .models import (
    AffineMap,
    ConditionVerdict,
    GeometricReport,
    Point2,
    Polygon,
    Thresholds,
)

logger = logging.getLogger(__name__)

CONVEX_EPS = 1e-12   # times diam**2
LP_EPS = 1e-10       # times diam
ANGLE_SUM_TOL = 1e-9


# ----- Helpers -----
def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _pairwise_distances(xy: np.ndarray) -> np.ndarray:
    diff = xy[:, None, :] - xy[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _edge_crosses(xy: np.ndarray) -> np.ndarray:
    """Cross product of consecutive edges at every vertex (turn at v_i)."""
    e_in = xy - np.roll(xy, 1, axis=0)      # v_i - v_(i-1)
    e_out = np.roll(xy, -1, axis=0) - xy    # v_(i+1) - v_i
    return _cross(e_in, e_out)


def _signed_area(xy: np.ndarray) -> float:
    return 0.5 * float(np.sum(_cross(xy, np.roll(xy, -1, axis=0))))


def convex_eps(p: Polygon) -> float:
    return CONVEX_EPS * diameter(p) ** 2


# ----- Construction -----
def validate_polygon(raw_vertices: Iterable) -> Polygon:
    """
    Build a Polygon from raw vertices. Clockwise input is reversed;
    anything that is not strictly convex is rejected.
    """
    pts = [Point2.of(v) for v in raw_vertices]
    if len(pts) < 3:
        raise TooFewVertices(f"need at least 3 vertices, got {len(pts)}")

    xy = np.array([[p.x, p.y] for p in pts], dtype=float)
    dist = _pairwise_distances(xy)
    diam = float(dist.max())
    eps = CONVEX_EPS * diam ** 2
    if diam == 0.0:
        raise DuplicateVertex("all vertices coincide")

    iu = np.triu_indices(len(pts), k=1)
    close = dist[iu] ** 2 <= eps
    if np.any(close):
        i, j = iu[0][close][0], iu[1][close][0]
        raise DuplicateVertex(f"vertices {i + 1} and {j + 1} coincide")

    area = _signed_area(xy)
    if abs(area) <= eps:
        raise NonConvex("polygon has no area")
    if area < 0:
        logger.debug("clockwise input, reversing %d vertices", len(pts))
        pts = pts[::-1]
        xy = xy[::-1].copy()

    crosses = _edge_crosses(xy)
    bad = np.flatnonzero(crosses <= eps)
    if bad.size:
        raise NonConvex(
            f"turn at vertex {int(bad[0]) + 1} is {float(crosses[bad[0]])!r} (<= {eps!r})"
        )

    # all left turns but winding more than once (e.g. a pentagram)
    e_in = xy - np.roll(xy, 1, axis=0)
    e_out = np.roll(xy, -1, axis=0) - xy
    turning = float(np.sum(np.arctan2(_cross(e_in, e_out), np.einsum("ij,ij->i", e_in, e_out))))
    if abs(turning - 2.0 * math.pi) > ANGLE_SUM_TOL:
        raise NonConvex(f"total turning {turning!r} is not 2*pi")

    return Polygon(tuple(pts))


# ----- Measurements -----
def diameter(p: Polygon) -> float:
    return float(_pairwise_distances(p.coords).max())


def polygon_area(p: Polygon) -> float:
    return _signed_area(p.coords)


def _edge_normals(p: Polygon) -> Tuple[np.ndarray, np.ndarray]:
    """Unit outward normals and offsets: inside means normals @ x <= offsets."""
    xy = p.coords
    e = np.roll(xy, -1, axis=0) - xy
    normals = np.column_stack((e[:, 1], -e[:, 0]))
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    offsets = np.einsum("ij,ij->i", normals, xy)
    return normals, offsets


def boundary_distance(p: Polygon, pts) -> np.ndarray:
    """Signed distance to the nearest edge line; positive inside."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    normals, offsets = _edge_normals(p)
    return np.min(offsets[None, :] - pts @ normals.T, axis=1)


def contains(p: Polygon, x, margin: float = 0.0) -> bool:
    return bool(boundary_distance(p, x)[0] >= margin)


def chebyshev_center(p: Polygon) -> Tuple[Point2, float]:
    """
    Largest inscribed disc. LP in (cx, cy, r):
        max r  s.t.  n_i . c + r <= n_i . v_i
    then polished by solving the three tightest constraints exactly.
    """
    normals, offsets = _edge_normals(p)
    A = np.hstack((normals, np.ones((p.n, 1))))
    res = linprog(
        c=np.array([0.0, 0.0, -1.0]),
        A_ub=A,
        b_ub=offsets,
        bounds=[(None, None), (None, None), (0.0, None)],
        method="highs",
    )
    if res.status != 0:
        raise NonConvex(f"inscribed-disc LP failed: {res.message}")
    z = np.asarray(res.x, dtype=float)

    tol = LP_EPS * diameter(p)
    slack = offsets - A @ z
    active = np.argsort(slack)[:3]
    try:
        polished = np.linalg.solve(A[active], offsets[active])
        if np.all(offsets - A @ polished >= -tol) and polished[2] >= z[2] - tol:
            z = polished
    except np.linalg.LinAlgError:
        pass
    return Point2(float(z[0]), float(z[1])), float(z[2])


def inscribed_ball_diameter(p: Polygon) -> float:
    return 2.0 * chebyshev_center(p)[1]


def interior_angles(p: Polygon) -> List[float]:
    xy = p.coords
    a = np.roll(xy, -1, axis=0) - xy   # towards v_(i+1)
    b = np.roll(xy, 1, axis=0) - xy    # towards v_(i-1)
    return [float(t) for t in np.arctan2(_cross(a, b), np.einsum("ij,ij->i", a, b))]


def quality_report(p: Polygon) -> GeometricReport:
    dist = _pairwise_distances(p.coords)
    diam = float(dist.max())
    rho = inscribed_ball_diameter(p)
    angles = interior_angles(p)
    d_min = float(dist[np.triu_indices(p.n, k=1)].min())
    return GeometricReport(
        diam=diam,
        rho=rho,
        sigma=diam / rho,
        d_m=d_min / diam,
        psi_M=max(angles),
        psi_m=min(angles),
        angles=tuple(angles),
        area=polygon_area(p),
    )


# ----- Condition checks -----
def check_conditions(r: GeometricReport, thresholds: Thresholds) -> ConditionVerdict:
    t = thresholds
    for name in ("sigma_max", "d_m_min", "psi_m_min", "psi_M_max"):
        v = getattr(t, name)
        if not (math.isfinite(v) and v > 0):
            raise InvalidThreshold(f"{name} must be positive, got {v!r}")
    if t.psi_M_max >= math.pi:
        raise InvalidThreshold(f"psi_M_max must be < pi, got {t.psi_M_max!r}")
    return ConditionVerdict(
        barp_holds=r.sigma <= t.sigma_max,
        melp_holds=r.d_m >= t.d_m_min,
        mac_holds=r.psi_m >= t.psi_m_min,
        MAC_holds=r.psi_M <= t.psi_M_max,
    )


def mac_from_barp_bound(sigma: float) -> float:
    """
    Smallest angle any convex polygon with diam/rho = sigma can have:
    the inscribed disc fits in the wedge of that angle cut at distance diam,
    so rho <= diam * angle.
    """
    return 1.0 / sigma


def barp_from_mac_melp_bound(psi_M: float, d_m: float) -> float:
    """
    A sigma valid under MAC(psi_M) and melp(d_m). Diagonal splitting ends
    in a triangle with sides >= d_m*diam and largest angle C in
    [pi/3, psi_M]; its inradius gives sigma <= 3 / (2 d_m^2 sin C).
    """
    if not (0 < d_m <= 1) or not (0 < psi_M < math.pi):
        raise InvalidThreshold(f"need 0 < d_m <= 1 and 0 < psi_M < pi, got {d_m!r}, {psi_M!r}")
    min_sin = min(math.sin(math.pi / 3), math.sin(psi_M))
    return 3.0 / (2.0 * d_m ** 2 * min_sin)


def lemma1_surrogate_ok(r: GeometricReport) -> bool:
    """psi_m >= 1/(4 sigma); flagged with a warning instead of raising."""
    ok = r.psi_m >= 0.25 / r.sigma
    if not ok:
        logger.warning("min angle %.6g below 1/(4*sigma) = %.6g; review", r.psi_m, 0.25 / r.sigma)
    return ok


# ----- Transforms -----
def apply_affine(p: Polygon, m: AffineMap) -> Polygon:
    det = m.det
    if not math.isfinite(det) or abs(det) <= CONVEX_EPS:
        raise SingularMap(f"linear part has det {det!r}")
    mapped = m.apply(p.coords)
    if det < 0:
        mapped = mapped[::-1]
    q = validate_polygon([(float(x), float(y)) for x, y in mapped])
    assert q.n == p.n
    return q
