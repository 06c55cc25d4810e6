from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field

XY = Tuple[float, float]


class ThresholdsIn(BaseModel):
    sigma_max: float
    d_m_min: float
    psi_m_min: float
    psi_M_max: float


class EvalRequest(BaseModel):
    vertices: List[XY] = Field(..., min_length=1)
    point: XY
    form: Literal["area", "cot"] = "area"
    grad: bool = False


class EvalOut(BaseModel):
    point: XY
    weights: List[float]
    coords: List[float]
    grads: Optional[List[XY]] = None


class QualityRequest(BaseModel):
    vertices: List[XY] = Field(..., min_length=1)
    thresholds: Optional[ThresholdsIn] = None


class ReportOut(BaseModel):
    diam: float
    rho: float
    sigma: float
    d_m: float
    psi_M: float
    psi_m: float
    angles: List[float]
    area: float


class VerdictOut(BaseModel):
    barp_holds: bool
    melp_holds: bool
    mac_holds: bool
    MAC_holds: bool


class QualityOut(BaseModel):
    report: ReportOut
    verdict: Optional[VerdictOut] = None


class RateOut(BaseModel):
    slope: float
    intercept: float
    r_squared: float
    points: int
