"""CSV ingestion of dated close-value series and date-intersection alignment.

Input format: UTF-8 text with a ``date,close`` header, one record per line,
ISO-8601 dates, ``.`` decimal point, LF or CRLF line endings. Extra columns
are ignored with a warning. Records with an empty close field are treated as
absent dates and dropped before alignment.
"""

from __future__ import annotations

import datetime
import io
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AlignmentError, CsvFormatError

__all__ = ["TimeSeries", "AlignedDataset", "parse_csv", "read_series", "align"]


def _readonly(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """A dated scalar series: one finite close value per strictly increasing date."""

    label: str
    dates: tuple[datetime.date, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", _readonly(self.values))
        if len(self.dates) != len(self.values):
            raise ValueError(
                f"{self.label}: {len(self.dates)} dates but {len(self.values)} values"
            )
        if len(self.dates) < 1:
            raise ValueError(f"{self.label}: empty series")
        if not all(isinstance(d, datetime.date) for d in self.dates):
            raise TypeError(f"{self.label}: dates must be datetime.date")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError(f"{self.label}: dates not strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"{self.label}: non-finite values")

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class AlignedDataset:
    """Two or more series sharing one date axis."""

    series: tuple[TimeSeries, ...]
    dates: tuple[datetime.date, ...]

    def __post_init__(self):
        object.__setattr__(self, "series", tuple(self.series))
        object.__setattr__(self, "dates", tuple(self.dates))
        if len(self.series) < 2:
            raise ValueError("an aligned dataset needs at least 2 series")
        for s in self.series:
            if s.dates != self.dates:
                raise ValueError(f"{s.label}: dates differ from the shared axis")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.series)

    def __len__(self) -> int:
        return len(self.dates)


def parse_csv(source, label: str) -> TimeSeries:
    """Parse one ``date,close`` CSV stream into a TimeSeries.

    ``source`` may be bytes, a binary file object, or a text file object.
    Records are sorted ascending by date; duplicate dates are rejected.
    Empty close fields are skipped (absent dates). Errors report the 1-based
    line number.
    """
    if isinstance(source, (bytes, bytearray)):
        text = bytes(source).decode("utf-8")
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    lines = text.splitlines()
    if not lines or not any(line.strip() for line in lines):
        raise CsvFormatError(f"{label}: empty file")

    header = [h.strip().lower() for h in lines[0].split(",")]
    if header[:2] != ["date", "close"]:
        raise CsvFormatError(
            f"{label}: expected header 'date,close', got {lines[0]!r}", line=1
        )
    if len(header) > 2:
        warnings.warn(
            f"{label}: ignoring extra column(s) {header[2:]}", stacklevel=2
        )

    records: dict[datetime.date, float] = {}
    first_line: dict[datetime.date, int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) < 2:
            raise CsvFormatError(f"{label}: expected 'date,close' record", line=lineno)
        date_text, close_text = fields[0].strip(), fields[1].strip()
        try:
            day = datetime.date.fromisoformat(date_text)
        except ValueError:
            raise CsvFormatError(
                f"{label}: malformed date {date_text!r}", line=lineno
            ) from None
        if not close_text:
            continue  # missing close: the date is treated as absent
        try:
            close = float(close_text)
        except ValueError:
            raise CsvFormatError(
                f"{label}: non-numeric close {close_text!r}", line=lineno
            ) from None
        if not np.isfinite(close):
            raise CsvFormatError(
                f"{label}: non-finite close {close_text!r}", line=lineno
            )
        if day in records:
            raise CsvFormatError(
                f"{label}: duplicate date {day.isoformat()} "
                f"(first seen on line {first_line[day]})",
                line=lineno,
            )
        records[day] = close
        first_line[day] = lineno

    if not records:
        raise CsvFormatError(f"{label}: no data records")
    days = sorted(records)
    return TimeSeries(label, tuple(days), [records[d] for d in days])


def read_series(path, label: str | None = None) -> TimeSeries:
    """Read a TimeSeries from a CSV file; label defaults to the file stem."""
    import pathlib

    p = pathlib.Path(path)
    with io.open(p, "rb") as fh:
        return parse_csv(fh, label if label is not None else p.stem)


def align(series_list) -> AlignedDataset:
    """Restrict every series to the dates present in all of them.

    Dates missing from any one series are deleted from all; the surviving
    dates keep their ascending order.
    """
    series_list = list(series_list)
    if len(series_list) < 2:
        raise AlignmentError("alignment needs at least 2 series")
    shared = set(series_list[0].dates)
    for s in series_list[1:]:
        shared &= set(s.dates)
    if not shared:
        raise AlignmentError(
            "empty date intersection across "
            + ", ".join(s.label for s in series_list)
        )
    axis = tuple(sorted(shared))
    aligned = []
    for s in series_list:
        index = {d: i for i, d in enumerate(s.dates)}
        keep = [index[d] for d in axis]
        aligned.append(TimeSeries(s.label, axis, s.values[keep]))
    return AlignedDataset(tuple(aligned), axis)
