# app/polygon_io.py
from __future__ import annotations

from pathlib import Path
from typing import List, Tuple, Union

import orjson

from .errors import PolygonFormatError
from .geometry import validate_polygon
from .models import Polygon

Vertex = Tuple[float, float]


def parse_text(text: str) -> List[Vertex]:
    """One "x y" (or "x,y") pair per line; blank lines and # comments ignored."""
    out: List[Vertex] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise PolygonFormatError(f"line {lineno}: expected 2 numbers, got {len(parts)}")
        try:
            out.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise PolygonFormatError(f"line {lineno}: not a number: {line!r}") from None
    return out


def parse_json(raw: Union[str, bytes]) -> List[Vertex]:
    """{"vertices": [[x, y], ...]} or a bare list of pairs."""
    try:
        data = orjson.loads(raw)
    except orjson.JSONDecodeError as exc:
        raise PolygonFormatError(f"invalid JSON: {exc}") from None
    if isinstance(data, dict):
        data = data.get("vertices")
    if not isinstance(data, list):
        raise PolygonFormatError('expected {"vertices": [[x, y], ...]}')
    out: List[Vertex] = []
    for k, item in enumerate(data):
        if not (isinstance(item, (list, tuple)) and len(item) == 2):
            raise PolygonFormatError(f"vertex {k}: expected [x, y], got {item!r}")
        try:
            out.append((float(item[0]), float(item[1])))
        except (TypeError, ValueError):
            raise PolygonFormatError(f"vertex {k}: not numeric: {item!r}") from None
    return out


def parse_point(text: str) -> Vertex:
    parts = [t for t in text.replace(",", " ").split() if t]
    if len(parts) != 2:
        raise PolygonFormatError(f"expected X,Y, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise PolygonFormatError(f"not a point: {text!r}") from None


def load_polygon(path: Union[str, Path]) -> Polygon:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise PolygonFormatError(f"cannot read {path}: {exc.strerror}") from None
    text = raw.decode("utf-8", errors="replace")
    is_json = path.suffix.lower() == ".json" or text.lstrip().startswith(("{", "["))
    vertices = parse_json(raw) if is_json else parse_text(text)
    return validate_polygon(vertices)


def dump_polygon(p: Polygon) -> bytes:
    return orjson.dumps({"vertices": [[v.x, v.y] for v in p.vertices]})
