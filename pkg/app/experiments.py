# app/experiments.py
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from .errors import (
    InvalidGrid,
    InvalidTolerance,
    NonPositiveData,
    ParamOutOfRange,
    TooFewPoints,
    WachspressError,
)
from .geometry import quality_report, validate_polygon
from .interperror import error_report, field_by_name
from .models import Family, FamilySpec, Point2, Polygon, RateFit, SweepRecord
from .settings import get_settings
from .wachspress import eval_coords, eval_coords_and_grads

logger = logging.getLogger(__name__)

CEX2_S_MAX = 0.5 ** 4
BOUND_SLACK = 1e-9


# ----- Paths / config loading -----
# s = offset + base**(-k) for k in [k_min, k_max]
DEFAULT_GRIDS: Dict[str, Dict[str, Any]] = {
    "cex1": {"offset": 0.5, "base": 2, "k_min": 2, "k_max": 10, "function": "x(1-x)"},
    "cex2": {"offset": 0.0, "base": 4, "k_min": 3, "k_max": 8, "function": "x^2"},
    "f1": {"offset": 0.0, "base": 2, "k_min": 1, "k_max": 8, "function": "x^2"},
    "f2": {"offset": 0.5, "base": 2, "k_min": 2, "k_max": 10, "function": "x(1-x)"},
    "rect": {"offset": 0.0, "base": 2, "k_min": 0, "k_max": 6, "function": "x^2"},
    "benign-square": {"offset": 0.0, "base": 2, "k_min": 0, "k_max": 3, "function": "sin(x)cos(y)"},
    "benign-ngon": {"offset": 0.0, "base": 2, "k_min": 0, "k_max": 3, "function": "sin(x)cos(y)", "sides": 6},
}


def _load_grid_config(path: Path) -> Dict[str, Dict[str, Any]]:
    if not path.exists():
        return DEFAULT_GRIDS
    data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    grids = data.get("grids") or {}
    return {name: {**default, **(grids.get(name) or {})} for name, default in DEFAULT_GRIDS.items()}


def grid_values(entry: Dict[str, Any]) -> Tuple[float, ...]:
    try:
        offset, base = float(entry["offset"]), float(entry["base"])
        k_min, k_max = int(entry["k_min"]), int(entry["k_max"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidGrid(f"bad grid entry {entry!r}: {exc}") from None
    if base <= 1 or k_max < k_min:
        raise InvalidGrid(f"bad grid entry {entry!r}")
    return tuple(offset + base ** (-k) for k in range(k_min, k_max + 1))


def default_spec(family: Family, path: Optional[Path] = None) -> FamilySpec:
    entry = _load_grid_config(path or get_settings().sweep_config)[family.value]
    return FamilySpec(
        family=family,
        s_values=grid_values(entry),
        function=str(entry["function"]),
        sides=int(entry.get("sides", 6)),
    )


def parse_grid(text: str) -> Tuple[float, ...]:
    """Comma-separated parameter values, e.g. "0.75,0.6,0.55"."""
    try:
        values = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise InvalidGrid(f"cannot parse grid {text!r}") from None
    if not values:
        raise InvalidGrid("empty grid")
    return values


# ----- Polygon families -----
def _require(ok: bool, what: str, s: float) -> None:
    if not (ok and math.isfinite(s)):
        raise ParamOutOfRange(f"{what}, got s={s!r}")


def make_cex1(s: float) -> Polygon:
    _require(0.5 < s < 1.0, "need 1/2 < s < 1", s)
    return validate_polygon([(0.0, 0.0), (1.0, 0.0), (s, s), (0.0, 1.0)])


def make_cex2(s: float) -> Polygon:
    _require(0.0 < s < CEX2_S_MAX, "need 0 < s < 1/16", s)
    a = 1.0 - s ** 0.25
    return validate_polygon([(0.0, 0.0), (1.0, 0.0), (a, s), (0.0, s)])


def make_f1(s: float) -> Polygon:
    _require(0.0 < s < 1.0, "need 0 < s < 1", s)
    return validate_polygon([(0.0, 0.0), (1.0, 0.0), (s, 1.0 - s), (0.0, 1.0 - s)])


def make_f2(s: float) -> Polygon:
    _require(0.5 < s < 1.0, "need 1/2 < s < 1", s)
    return validate_polygon([(0.0, 0.0), (1.0, 0.0), (s, s), (0.0, 1.0)])


def make_rectangle(s: float) -> Polygon:
    """[0,1] x [0,s]: right angles everywhere, aspect ratio ~ 1/s."""
    _require(0.0 < s <= 1.0, "need 0 < s <= 1", s)
    return validate_polygon([(0.0, 0.0), (1.0, 0.0), (1.0, s), (0.0, s)])


def make_square(h: float) -> Polygon:
    _require(h > 0.0, "need h > 0", h)
    return validate_polygon([(0.0, 0.0), (h, 0.0), (h, h), (0.0, h)])


def make_ngon(h: float, sides: int = 6) -> Polygon:
    """Regular polygon on the circle of diameter h about the origin."""
    _require(h > 0.0, "need h > 0", h)
    if sides < 3:
        raise ParamOutOfRange(f"need at least 3 sides, got {sides}")
    t = 2.0 * math.pi * np.arange(sides) / sides
    return validate_polygon(np.column_stack((np.cos(t), np.sin(t))) * (h / 2.0))


def build_polygon(spec: FamilySpec, s: float) -> Polygon:
    f = spec.family
    if f is Family.BENIGN_NGON:
        return make_ngon(s, spec.sides)
    return {
        Family.CEX1: make_cex1,
        Family.CEX2: make_cex2,
        Family.F1: make_f1,
        Family.F2: make_f2,
        Family.RECT: make_rectangle,
        Family.BENIGN_SQUARE: make_square,
    }[f](s)


# ----- Closed forms -----
def oracle_lambda_cex1(s: float, x) -> float:
    _require(0.5 < s < 1.0, "need 1/2 < s < 1", s)
    pt = Point2.of(x)
    return (2 * s - 1) * pt.x / s * pt.y / ((s - 1) * (pt.x + pt.y) + s)


def oracle_lambda_cex2(s: float, x) -> Tuple[float, float]:
    _require(0.0 < s < CEX2_S_MAX, "need 0 < s < 1/16", s)
    pt = Point2.of(x)
    a = 1.0 - s ** 0.25
    den = s + pt.y * (a - 1)
    return pt.x * (s - pt.y) / den, pt.x * pt.y / den


def oracle_grad_iu_cex2(s: float, x) -> float:
    """d(Iu)/dy for u = x^2 on the second counterexample."""
    _require(0.0 < s < CEX2_S_MAX, "need 0 < s < 1/16", s)
    pt = Point2.of(x)
    a = 1.0 - s ** 0.25
    return pt.x * s * a * (a - 1) / (s + pt.y * (a - 1)) ** 2


def region_area_ts(s: float) -> float:
    _require(0.5 < s < 1.0, "need 1/2 < s < 1", s)
    return (2 * s - 1) / (16 * s)


def region_area_ds(s: float) -> float:
    _require(0.0 < s < CEX2_S_MAX, "need 0 < s < 1/16", s)
    return (1.0 - s ** 0.25) * s / 2


def cex1_lower_bound(s: float) -> float:
    """s(1-s) times the L2(T_s) bound on d(lambda_3)/dy."""
    _require(0.5 < s < 1.0, "need 1/2 < s < 1", s)
    return s * (1 - s) * math.sqrt((3 * s - 1) ** 2 / (2 ** 10 * s ** 3 * (2 * s - 1)))


def cex2_lower_bound(s: float) -> float:
    _require(0.0 < s < CEX2_S_MAX, "need 0 < s < 1/16", s)
    return math.sqrt((1.0 - s ** 0.25) ** 3 / (8 * math.sqrt(s)))


def cex2_max_angle(s: float) -> float:
    """Interior angle at v3 = (1 - s^(1/4), s)."""
    _require(0.0 < s < CEX2_S_MAX, "need 0 < s < 1/16", s)
    return math.pi - math.atan(s ** 0.75)


# ----- Pointwise checks -----
def _triangle_grid(a, b, c, resolution: int) -> np.ndarray:
    """Centroids of the upright cells of a resolution^2 subdivision; all strictly inside."""
    if resolution < 1:
        raise InvalidGrid(f"grid resolution must be >= 1, got {resolution}")
    i, j = np.meshgrid(np.arange(resolution), np.arange(resolution), indexing="ij")
    keep = (i + j) <= resolution - 1
    u = (i[keep] + 1.0 / 3.0) / resolution
    v = (j[keep] + 1.0 / 3.0) / resolution
    a, b, c = (np.asarray(q, dtype=float) for q in (a, b, c))
    return a + np.outer(u, b - a) + np.outer(v, c - a)


def ts_points(s: float, resolution: int) -> np.ndarray:
    _require(0.5 < s < 1.0, "need 1/2 < s < 1", s)
    return _triangle_grid((0.25, 0.75), (0.5, 0.5), (0.5, (3 * s - 1) / (2 * s)), resolution)


def ds_points(s: float, resolution: int) -> np.ndarray:
    """Cell midpoints of D_s = K_s with x >= 1/2, stretched row by row to the slanted edge."""
    _require(0.0 < s < CEX2_S_MAX, "need 0 < s < 1/16", s)
    if resolution < 1:
        raise InvalidGrid(f"grid resolution must be >= 1, got {resolution}")
    a = 1.0 - s ** 0.25
    t = (np.arange(resolution) + 0.5) / resolution
    Y, T = np.meshgrid(s * t, t, indexing="ij")
    x_max = 1.0 - (1.0 - a) * Y / s
    X = 0.5 + (x_max - 0.5) * T
    return np.column_stack((X.ravel(), Y.ravel()))


def pointwise_bound_check_cex1(s: float, resolution: int = 100) -> bool:
    """d(lambda_3)/dy >= (3s-1)/(8s(2s-1)) on T_s, from the implemented gradients."""
    pts = ts_points(s, resolution)
    _, grads = eval_coords_and_grads(make_cex1(s), pts)
    bound = (3 * s - 1) / (8 * s * (2 * s - 1))
    worst = float(grads[:, 2, 1].min())
    logger.debug("cex1 s=%g: min d(lambda3)/dy on T_s = %.12g, bound %.12g", s, worst, bound)
    return worst >= bound - BOUND_SLACK


def pointwise_bound_check_cex2(s: float, resolution: int = 100) -> bool:
    """|d(Iu - u)/dy| >= a(1-a)/(2s) on D_s for u = x^2."""
    pts = ds_points(s, resolution)
    a = 1.0 - s ** 0.25
    _, grads = eval_coords_and_grads(make_cex2(s), pts)
    # u(v2) = 1, u(v3) = a^2, zero elsewhere; u_y = 0
    dy = grads[:, 1, 1] + a * a * grads[:, 2, 1]
    bound = a * (1 - a) / (2 * s)
    worst = float(np.abs(dy).min())
    logger.debug("cex2 s=%g: min |d(Iu-u)/dy| on D_s = %.12g, bound %.12g", s, worst, bound)
    return worst >= bound * (1 - BOUND_SLACK)


def oracle_max_deviation_cex1(s: float, resolution: int = 44) -> float:
    """Largest relative gap between the evaluated and closed-form lambda_3 on K_s."""
    p = make_cex1(s)
    pts = _triangle_grid((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), resolution)
    # K_s is the union of these two triangles
    extra = _triangle_grid((1.0, 0.0), (s, s), (0.0, 1.0), resolution)
    pts = np.vstack((pts, extra))
    lam3 = eval_coords(p, pts)[:, 2]
    ref = np.array([oracle_lambda_cex1(s, q) for q in pts])
    return float(np.max(np.abs(lam3 - ref) / np.maximum(np.abs(ref), 1e-300)))


# ----- Sweeps -----
def validate_spec(spec: FamilySpec) -> None:
    if not spec.s_values:
        raise InvalidGrid("empty parameter grid")
    field_by_name(spec.function)
    for s in spec.s_values:
        build_polygon(spec, s)


def _lower_bound(spec: FamilySpec, s: float) -> Optional[float]:
    if spec.family is Family.CEX1 and spec.function == "x(1-x)":
        return cex1_lower_bound(s)
    if spec.family is Family.CEX2 and spec.function == "x^2":
        return cex2_lower_bound(s)
    return None


def _row(spec: FamilySpec, s: float, tol: float) -> SweepRecord:
    rec = SweepRecord(s=s, paper_lower_bound=_lower_bound(spec, s))
    logger.debug("sweep %s: s=%g start", spec.family.value, s)
    try:
        p = build_polygon(spec, s)
        q = quality_report(p)
        rec.diam, rec.sigma, rec.d_m = q.diam, q.sigma, q.d_m
        rec.psi_M, rec.psi_m = q.psi_M, q.psi_m
        r = error_report(p, field_by_name(spec.function), tol)
        rec.l2_error, rec.h1_semi_error, rec.h1_error = r.l2_error, r.h1_semi_error, r.h1_error
        rec.h2_semi, rec.ratio = r.h2_semi, r.ratio
    except WachspressError as exc:
        logger.warning("sweep %s: s=%g failed: %s: %s", spec.family.value, s, type(exc).__name__, exc)
        rec.error = f"{type(exc).__name__}: {exc}"
    logger.debug("sweep %s: s=%g done", spec.family.value, s)
    return rec


def run_sweep(spec: FamilySpec, tol: Optional[float] = None, workers: Optional[int] = None) -> List[SweepRecord]:
    """
    One record per s, ordered by s. Failures stay in the table with their
    error text; the counterexample families default to the tight tolerance.
    """
    validate_spec(spec)
    S = get_settings()
    if tol is None:
        tol = S.tol_tight if spec.family in (Family.CEX1, Family.CEX2) else S.tol
    if not tol > 0:
        raise InvalidTolerance(f"tol must be positive, got {tol!r}")
    workers = max(1, S.sweep_workers if workers is None else workers)
    values = sorted(spec.s_values)
    if workers == 1:
        rows = [_row(spec, s, tol) for s in values]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda s: _row(spec, s, tol), values))
    return sorted(rows, key=lambda r: r.s)


def fit_rate(xs: Sequence[float], ys: Sequence[float]) -> RateFit:
    """Least-squares line through (log x, log y)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape:
        raise InvalidGrid(f"x and y differ in length ({x.size} vs {y.size})")
    if x.size < 3:
        raise TooFewPoints(f"need at least 3 points, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y)) and np.all(x > 0) and np.all(y > 0)):
        raise NonPositiveData("rate fits need finite positive data")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RateFit(slope=float(slope), intercept=float(intercept), r_squared=float(min(1.0, max(0.0, r2))))
