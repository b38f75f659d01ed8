"""CSV readers and writers for the command line tools.

Dialect: comma separated, header row required, UTF-8, '.' decimal point.
Floats are written with 12 significant digits and rationals as ``num/den``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError


class ParseError(InputError):
    pass


def fmt(value) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


def _float(cell: str, where: str) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise ParseError(f"{where}: not a number: {cell!r}") from None
    if not math.isfinite(v):
        raise ParseError(f"{where}: non-finite value {cell!r}")
    return v


def _rows(path: str | Path) -> list[list[str]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise ParseError(f"{path}: not valid UTF-8") from None
    return [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]


def read_pairs(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Two-column CSV with a header row; returns ``(x, y)``."""
    rows = _rows(path)
    if not rows:
        raise ParseError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    if len(header) != 2:
        raise ParseError(f"{path}: header must have exactly two columns, found {len(header)}")
    if not body:
        raise ParseError(f"{path}: no data rows")
    x, y = [], []
    for lineno, row in enumerate(body, start=2):
        if len(row) != 2:
            raise ParseError(f"{path}: line {lineno}: expected 2 fields, found {len(row)}")
        x.append(_float(row[0], f"{path}: line {lineno}"))
        y.append(_float(row[1], f"{path}: line {lineno}"))
    return np.array(x), np.array(y)


@dataclass(frozen=True)
class ScreenInput:
    ids: list[str]
    x: np.ndarray
    matrix: np.ndarray

    def __post_init__(self):
        if len(set(self.ids)) != len(self.ids):
            seen = set()
            dup = next(i for i in self.ids if i in seen or seen.add(i))
            raise ParseError(f"duplicate row id {dup!r}")
        if self.matrix.shape != (len(self.ids), self.x.size):
            raise ParseError("matrix shape does not match ids and x")


def read_x_file(path: str | Path) -> np.ndarray:
    """Condition values, one per cell; a leading non-numeric header cell is skipped."""
    cells = [c.strip() for r in _rows(path) for c in r if c.strip()]
    if cells:
        try:
            float(cells[0])
        except ValueError:
            cells = cells[1:]
    if not cells:
        raise ParseError(f"{path}: no values")
    return np.array([_float(c, f"{path}") for c in cells])


def read_matrix(path: str | Path, x_override: np.ndarray | None = None) -> ScreenInput:
    """Screening matrix: first column ``id``, one column per condition."""
    rows = _rows(path)
    if not rows:
        raise ParseError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    if not header or header[0].strip().lower() != "id":
        raise ParseError(f"{path}: first header cell must be 'id'")
    t = len(header) - 1
    if t < 2:
        raise ParseError(f"{path}: need at least two condition columns")
    if x_override is not None:
        x = np.asarray(x_override, dtype=float)
        if x.size != t:
            raise ParseError(f"x-file has {x.size} values but the matrix has {t} condition columns")
    else:
        x = np.array([_float(c, f"{path}: header (use --x-file for non-numeric headers)") for c in header[1:]])
    if not body:
        raise ParseError(f"{path}: no data rows")
    ids, values = [], []
    for lineno, row in enumerate(body, start=2):
        if len(row) != t + 1:
            raise ParseError(f"{path}: row {lineno - 1} (line {lineno}): expected {t + 1} fields, found {len(row)}")
        ids.append(row[0].strip())
        values.append([_float(c, f"{path}: row {lineno - 1} (line {lineno})") for c in row[1:]])
    return ScreenInput(ids, x, np.array(values))


def write_csv(out, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
