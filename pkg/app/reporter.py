# app/reporter.py
from __future__ import annotations

from dataclasses import asdict
from io import StringIO
from pathlib import Path
from typing import List, Tuple, Union

import pandas as pd

from .errors import TableFormatError
from .models import SWEEP_COLUMNS, SweepRecord


def to_dataframe(rows: List[SweepRecord]) -> pd.DataFrame:
    """Sweep rows in the fixed column order; the per-row error text is dropped."""
    df = pd.DataFrame([asdict(r) for r in rows], columns=SWEEP_COLUMNS + ["error"])
    return df[SWEEP_COLUMNS].astype("float64")


def failed_rows(rows: List[SweepRecord]) -> List[SweepRecord]:
    return [r for r in rows if r.error]


def csv_export(rows: List[SweepRecord]) -> str:
    # float_format=None keeps repr(float), i.e. shortest round-trip; NaN -> ""
    buf = StringIO()
    to_dataframe(rows).to_csv(buf, index=False, na_rep="", lineterminator="\n")
    return buf.getvalue()


def write_csv(rows: List[SweepRecord], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_export(rows), encoding="utf-8")
    return path


def read_csv(path: Union[str, Path]) -> pd.DataFrame:
    try:
        return pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise TableFormatError(f"cannot read {path}: {exc}") from None


def paired_columns(df: pd.DataFrame, x: str, y: str) -> Tuple[List[float], List[float]]:
    """Two columns, keeping only rows where both cells are filled."""
    for name in (x, y):
        if name not in df.columns:
            raise TableFormatError(f"no column {name!r}; have {list(df.columns)}")
    both = df[[x, y]].dropna()
    return both[x].astype(float).tolist(), both[y].astype(float).tolist()
