"""CSV ingestion and deterministic emission of series and fit results."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInputError, InvalidInputError, ParseError
from .series import SalesSeries

PENETRATION = "penetration"
SALES = "sales"
PRICE = "price"

_KINDS = (PENETRATION, SALES, PRICE)


@dataclass(frozen=True)
class Dataset:
    """A labeled empirical time series on a uniform grid.

    ``resampled`` marks input that arrived on a non-uniform grid and was
    linearly interpolated onto a uniform one.
    """

    kind: str
    series: SalesSeries
    units: str = "fraction"
    source_label: str = ""
    resampled: bool = False

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidInputError(f"unknown dataset kind {self.kind!r}")
        v = self.series.values
        if self.kind == PRICE:
            if np.any(v <= 0):
                raise InvalidInputError("price values must be positive")
        elif np.any(v < 0):
            raise InvalidInputError(f"{self.kind} values must be non-negative")


def load_csv(path, kind: str = SALES, units: str = "fraction") -> Dataset:
    """Read a `t,value` CSV into a Dataset.

    Rows must be numeric and strictly increasing in t.  A non-uniform time
    grid is resampled by linear interpolation at the median spacing and
    flagged on the result.
    """
    t, v = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyInputError(f"{path}: file is empty")
        if [c.strip().lower() for c in header[:2]] != ["t", "value"]:
            raise ParseError(f"{path}: expected header 't,value'", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise ParseError(f"{path}: expected two columns", line=lineno)
            try:
                t.append(float(row[0]))
                v.append(float(row[1]))
            except ValueError:
                raise ParseError(
                    f"{path}: non-numeric row {row!r}", line=lineno
                ) from None
    if not t:
        raise EmptyInputError(f"{path}: no data rows")
    t = np.asarray(t)
    v = np.asarray(v)
    if np.any(np.diff(t) <= 0):
        raise ParseError(f"{path}: time column must be strictly increasing")
    resampled = False
    if len(t) == 1:
        dt = 1.0
    else:
        steps = np.diff(t)
        dt = float(np.median(steps))
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-9):
            grid = np.arange(t[0], t[-1] + 0.5 * dt, dt)
            v = np.interp(grid, t, v)
            t = grid
            resampled = True
    return Dataset(
        kind=kind,
        series=SalesSeries(float(t[0]), dt, v),
        units=units,
        source_label=str(path),
        resampled=resampled,
    )


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def emit(obj, path, format: str = "csv") -> None:
    """Write a series, a component mapping, or a fit result to disk.

    ``csv`` produces `t,value` rows (`t,value,component` for a mapping of
    named series); ``plot-data`` produces whitespace-delimited columns with
    a `#` header.  Output is byte-deterministic for fixed input.
    """
    if format not in ("csv", "plot-data"):
        raise InvalidInputError(f"unknown emit format {format!r}")
    from .fitting import FitResult

    if isinstance(obj, Dataset):
        obj = obj.series
    if isinstance(obj, FitResult):
        _emit_rows(
            path,
            format,
            ["parameter", "value"],
            [(k, _fmt(v)) for k, v in sorted(obj.parameters.items())]
            + [
                ("loss", _fmt(obj.loss)),
                ("n_evals", str(obj.n_evals)),
                ("converged", str(int(obj.converged))),
            ],
        )
        return
    if isinstance(obj, SalesSeries):
        rows = [(_fmt(t), _fmt(v)) for t, v in zip(obj.times, obj.values)]
        _emit_rows(path, format, ["t", "value"], rows)
        return
    if isinstance(obj, dict):
        rows = []
        for name in obj:
            s = obj[name]
            rows.extend(
                (_fmt(t), _fmt(v), name) for t, v in zip(s.times, s.values)
            )
        _emit_rows(path, format, ["t", "value", "component"], rows)
        return
    raise InvalidInputError(f"cannot emit object of type {type(obj).__name__}")


def _emit_rows(path, format: str, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        if format == "csv":
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        else:
            fh.write("# " + " ".join(header) + "\n")
            for row in rows:
                fh.write(" ".join(str(c) for c in row) + "\n")
