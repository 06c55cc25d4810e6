# app/service.py
"""Request-level operations shared by the CLI and the HTTP routes."""
from __future__ import annotations

from dataclasses import asdict
from typing import Optional, Sequence

from .geometry import check_conditions, quality_report, validate_polygon
from .models import Polygon, Thresholds
from .schemas import EvalOut, QualityOut, ReportOut, ThresholdsIn, VerdictOut
from .wachspress import coordinates

FORMS = {"area": "area", "cot": "cotangent"}


def evaluate(p: Polygon, point: Sequence[float], form: str = "area", grad: bool = False) -> EvalOut:
    ev = coordinates(p, point, form=FORMS[form], with_grads=grad)  # type: ignore[arg-type]
    return EvalOut(
        point=(ev.point.x, ev.point.y),
        weights=list(ev.weights),
        coords=list(ev.coords),
        grads=list(ev.grads) if ev.grads is not None else None,
    )


def assess(p: Polygon, thresholds: Optional[ThresholdsIn] = None) -> QualityOut:
    r = quality_report(p)
    verdict = None
    if thresholds is not None:
        v = check_conditions(r, Thresholds(**thresholds.model_dump()))
        verdict = VerdictOut(**asdict(v))
    report = asdict(r)
    report["angles"] = list(r.angles)
    return QualityOut(report=ReportOut(**report), verdict=verdict)


def polygon_from(vertices: Sequence[Sequence[float]]) -> Polygon:
    return validate_polygon(vertices)
