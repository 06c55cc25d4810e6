# app/interperror.py
from __future__ import annotations

import logging
import math
from typing import Callable, Dict, Optional

import numpy as np

from .errors import MissingHessian, ValidationError, ZeroH2
from .geometry import diameter
from .models import ErrorReport, Polygon, ScalarField
from .quadrature import integrate
from .settings import get_settings
from .wachspress import eval_coords, eval_coords_and_grads

logger = logging.getLogger(__name__)

ZERO_H2 = 1e-12
FD_STEP = 1e-6
FD_REL = 1e-6

_PROBE = np.array([[0.1, 0.2], [0.7, 0.3], [0.45, 0.9], [-0.6, 1.4], [1.3, -0.2]])


# ----- Built-in fields -----
def gradient_consistent(u: ScalarField, pts: np.ndarray = _PROBE, rel: float = FD_REL) -> bool:
    """Central differences of u.value against u.gradient."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    g = u.gradient(pts)
    ex = np.array([FD_STEP, 0.0])
    ey = np.array([0.0, FD_STEP])
    fd = np.column_stack((
        (u.value(pts + ex) - u.value(pts - ex)) / (2 * FD_STEP),
        (u.value(pts + ey) - u.value(pts - ey)) / (2 * FD_STEP),
    ))
    return bool(np.all(np.abs(fd - g) <= rel * np.maximum(1.0, np.abs(g))))


def _checked(u: ScalarField) -> ScalarField:
    if not gradient_consistent(u):
        raise ValidationError(f"gradient of {u.label!r} disagrees with its values")
    return u


def _hess(fn: Callable[[np.ndarray], tuple]) -> Callable[[np.ndarray], np.ndarray]:
    def h(pts: np.ndarray) -> np.ndarray:
        xx, xy, yy = fn(pts)
        n = len(pts)
        out = np.empty((n, 2, 2))
        out[:, 0, 0] = xx
        out[:, 0, 1] = out[:, 1, 0] = xy
        out[:, 1, 1] = yy
        return out
    return h


def affine_field(c0: float, c1: float, c2: float) -> ScalarField:
    zero = lambda p: np.zeros(len(p))  # noqa: E731
    return _checked(ScalarField(
        value=lambda p: c0 + c1 * p[:, 0] + c2 * p[:, 1],
        gradient=lambda p: np.tile([c1, c2], (len(p), 1)).astype(float),
        hessian=_hess(lambda p: (zero(p), zero(p), zero(p))),
        label=f"{c0}+{c1}x+{c2}y",
    ))


def constant_field(c: float = 1.0) -> ScalarField:
    return affine_field(c, 0.0, 0.0)


def x_squared() -> ScalarField:
    return _checked(ScalarField(
        value=lambda p: p[:, 0] ** 2,
        gradient=lambda p: np.column_stack((2 * p[:, 0], np.zeros(len(p)))),
        hessian=_hess(lambda p: (np.full(len(p), 2.0), np.zeros(len(p)), np.zeros(len(p)))),
        label="x^2",
    ))


def x_times_y() -> ScalarField:
    return _checked(ScalarField(
        value=lambda p: p[:, 0] * p[:, 1],
        gradient=lambda p: np.column_stack((p[:, 1], p[:, 0])),
        hessian=_hess(lambda p: (np.zeros(len(p)), np.ones(len(p)), np.zeros(len(p)))),
        label="xy",
    ))


def x_one_minus_x() -> ScalarField:
    return _checked(ScalarField(
        value=lambda p: p[:, 0] * (1 - p[:, 0]),
        gradient=lambda p: np.column_stack((1 - 2 * p[:, 0], np.zeros(len(p)))),
        hessian=_hess(lambda p: (np.full(len(p), -2.0), np.zeros(len(p)), np.zeros(len(p)))),
        label="x(1-x)",
    ))


def sin_cos() -> ScalarField:
    return _checked(ScalarField(
        value=lambda p: np.sin(p[:, 0]) * np.cos(p[:, 1]),
        gradient=lambda p: np.column_stack((
            np.cos(p[:, 0]) * np.cos(p[:, 1]),
            -np.sin(p[:, 0]) * np.sin(p[:, 1]),
        )),
        hessian=_hess(lambda p: (
            -np.sin(p[:, 0]) * np.cos(p[:, 1]),
            -np.cos(p[:, 0]) * np.sin(p[:, 1]),
            -np.sin(p[:, 0]) * np.cos(p[:, 1]),
        )),
        label="sin(x)cos(y)",
    ))


FIELDS: Dict[str, Callable[[], ScalarField]] = {
    "one": constant_field,
    "x^2": x_squared,
    "xy": x_times_y,
    "x(1-x)": x_one_minus_x,
    "sin(x)cos(y)": sin_cos,
}


def field_by_name(name: str) -> ScalarField:
    try:
        return FIELDS[name]()
    except KeyError:
        raise ValidationError(f"unknown function {name!r}; choose one of {sorted(FIELDS)}") from None


def scale_field(u: ScalarField, h: float) -> ScalarField:
    """u composed with x -> x/h, for moving u onto h*Omega."""
    hess = None
    if u.hessian is not None:
        hess = lambda p: u.hessian(p / h) / h ** 2  # noqa: E731
    return ScalarField(
        value=lambda p: u.value(p / h),
        gradient=lambda p: u.gradient(p / h) / h,
        hessian=hess,
        label=f"{u.label}(x/{h:g})",
    )


# ----- Interpolant -----
def interpolate(p: Polygon, u: ScalarField) -> ScalarField:
    """Iu = sum_i u(v_i) lambda_i; gradient only at interior points."""
    nodal = np.asarray(u.value(p.coords), dtype=float)
    return ScalarField(
        value=lambda pts: eval_coords(p, pts) @ nodal,
        gradient=lambda pts: np.einsum("i,nik->nk", nodal, eval_coords_and_grads(p, pts)[1]),
        hessian=None,
        label=f"I[{u.label}]",
    )


# ----- Norms -----
def _tol(tol: Optional[float]) -> float:
    return get_settings().tol if tol is None else tol


def l2_error(p: Polygon, u: ScalarField, tol: Optional[float] = None) -> float:
    nodal = np.asarray(u.value(p.coords), dtype=float)

    def f(pts: np.ndarray) -> np.ndarray:
        return (u.value(pts) - eval_coords(p, pts) @ nodal) ** 2

    return math.sqrt(max(integrate(p, f, _tol(tol)).value, 0.0))


def h1_seminorm_error(p: Polygon, u: ScalarField, tol: Optional[float] = None) -> float:
    nodal = np.asarray(u.value(p.coords), dtype=float)

    def f(pts: np.ndarray) -> np.ndarray:
        _, grads = eval_coords_and_grads(p, pts)
        d = u.gradient(pts) - np.einsum("i,nik->nk", nodal, grads)
        return np.einsum("nk,nk->n", d, d)

    return math.sqrt(max(integrate(p, f, _tol(tol)).value, 0.0))


def h1_error(p: Polygon, u: ScalarField, tol: Optional[float] = None) -> float:
    return math.hypot(l2_error(p, u, tol), h1_seminorm_error(p, u, tol))


def h2_seminorm(p: Polygon, u: ScalarField, tol: Optional[float] = None) -> float:
    if u.hessian is None:
        raise MissingHessian(f"{u.label!r} has no Hessian")

    def f(pts: np.ndarray) -> np.ndarray:
        H = u.hessian(pts)
        return H[:, 0, 0] ** 2 + 2 * H[:, 0, 1] ** 2 + H[:, 1, 1] ** 2

    return math.sqrt(max(integrate(p, f, _tol(tol)).value, 0.0))


def error_report(
    p: Polygon,
    u: ScalarField,
    tol: Optional[float] = None,
    *,
    require_ratio: bool = False,
) -> ErrorReport:
    """
    All norms of u - Iu plus the measured estimate ratio
    ||u - Iu||_H1 / (diam |u|_H2). An affine u has no ratio: it is left
    empty, or ZeroH2 is raised when require_ratio is set.
    """
    l2 = l2_error(p, u, tol)
    semi = h1_seminorm_error(p, u, tol)
    h2 = h2_seminorm(p, u, tol)
    diam = diameter(p)
    full = math.hypot(l2, semi)
    ratio = semi_ratio = None
    if h2 < ZERO_H2:
        if require_ratio:
            raise ZeroH2(h2)
        logger.info("|u|_H2 ~ 0 for %s; ratio left empty", u.label)
    else:
        ratio = full / (diam * h2)
        semi_ratio = semi / (diam * h2)
    return ErrorReport(
        l2_error=l2,
        h1_semi_error=semi,
        h1_error=full,
        h2_semi=h2,
        diam=diam,
        ratio=ratio,
        semi_ratio=semi_ratio,
    )
