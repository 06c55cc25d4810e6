from fastapi import APIRouter, HTTPException

from ..errors import NumericalError, ValidationError
from ..schemas import EvalOut, EvalRequest, QualityOut, QualityRequest
from ..service import assess, evaluate, polygon_from

router = APIRouter(tags=["wachspress"])


def _http(exc: Exception) -> HTTPException:
    status = 422 if isinstance(exc, ValidationError) else 500
    return HTTPException(status_code=status, detail={"error": type(exc).__name__, "detail": str(exc)})


@router.post("/eval", response_model=EvalOut)
def eval_point(req: EvalRequest):
    """Wachspress coordinates (and optionally gradients) of one point."""
    try:
        return evaluate(polygon_from(req.vertices), req.point, req.form, req.grad)
    except (ValidationError, NumericalError) as exc:
        raise _http(exc) from None


@router.post("/quality", response_model=QualityOut)
def quality(req: QualityRequest):
    try:
        return assess(polygon_from(req.vertices), req.thresholds)
    except (ValidationError, NumericalError) as exc:
        raise _http(exc) from None
