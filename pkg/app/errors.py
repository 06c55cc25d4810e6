# app/errors.py
from __future__ import annotations

from typing import Optional


class WachspressError(Exception):
    """Base for everything this package raises on purpose."""


# ----- Input / validation failures (CLI exit 2, HTTP 422) -----
class ValidationError(WachspressError, ValueError):
    pass


class TooFewVertices(ValidationError):
    pass


class DuplicateVertex(ValidationError):
    pass


class NonConvex(ValidationError):
    pass


class SingularMap(ValidationError):
    pass


class InvalidThreshold(ValidationError):
    pass


class OutsidePolygon(ValidationError):
    pass


class BoundaryPoint(ValidationError):
    pass


class ParamOutOfRange(ValidationError):
    pass


class InvalidGrid(ValidationError):
    pass


class NonPositiveData(ValidationError):
    pass


class TooFewPoints(ValidationError):
    pass


class MissingHessian(ValidationError):
    pass


class NonFiniteInput(ValidationError):
    pass


class PolygonFormatError(ValidationError):
    pass


class TableFormatError(ValidationError):
    pass


class InvalidTolerance(ValidationError):
    pass


# ----- Numerical failures (CLI exit 3, HTTP 500) -----
class NumericalError(WachspressError, ArithmeticError):
    pass


class CellCapExceeded(NumericalError):
    """Adaptive quadrature ran out of cells; keeps the best answer it had."""
    def __init__(self, value: float, error_estimate: float, cells_used: int) -> None:
        super().__init__(
            f"cell cap reached after {cells_used} cells "
            f"(value={value!r}, estimate={error_estimate!r})"
        )
        self.value = value
        self.error_estimate = error_estimate
        self.cells_used = cells_used


class NonFiniteSample(NumericalError):
    pass


class DegenerateNormalization(NumericalError):
    pass


class ZeroH2(NumericalError):
    def __init__(self, h2_semi: float, message: Optional[str] = None) -> None:
        super().__init__(message or f"|u|_H2 = {h2_semi!r} is numerically zero")
        self.h2_semi = h2_semi
