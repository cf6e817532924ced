"""Calendar-anchored daily series.

Weekdays follow the ISO convention with Monday = 0 (``date.weekday()``).
"""
from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateDateError,
    GapError,
    IndexOutOfRange,
    InputError,
    NonPositiveError,
)

PERIOD = 7
ONE_DAY = dt.timedelta(days=1)


@dataclass(frozen=True, eq=False)
class DailySeries:
    """Contiguous, strictly positive daily observations.

    ``values[i]`` is the observation for ``start_date + i`` days. The value
    array is stored read-only so a series can be shared between workers.
    """

    start_date: dt.date
    values: np.ndarray

    def __post_init__(self):
        if isinstance(self.start_date, dt.datetime) or not isinstance(self.start_date, dt.date):
            raise InputError(f"start_date must be a datetime.date, got {self.start_date!r}")
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            raise InputError("values must be one-dimensional")
        bad = ~(np.isfinite(values) & (values > 0))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise NonPositiveError(i, float(values[i]))
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, DailySeries):
            return NotImplemented
        return self.start_date == other.start_date and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"DailySeries(start={self.start_date.isoformat()}, n={len(self)})"

    @property
    def end_date(self) -> dt.date:
        return self.start_date + (len(self) - 1) * ONE_DAY

    @property
    def dates(self) -> list[dt.date]:
        return [self.start_date + i * ONE_DAY for i in range(len(self))]

    @property
    def weekdays(self) -> np.ndarray:
        """ISO weekday (Monday = 0) of every point."""
        return (self.start_date.weekday() + np.arange(len(self))) % PERIOD

    def date_at(self, index: int) -> dt.date:
        _check_index(self, index)
        return self.start_date + index * ONE_DAY

    def scaled(self, factor: float) -> DailySeries:
        return DailySeries(self.start_date, self.values * factor)

    def records(self) -> list[tuple[dt.date, float]]:
        return list(zip(self.dates, self.values.tolist()))


@dataclass(frozen=True)
class DayIndex:
    index: int
    weekday: int


def _check_index(series: DailySeries, index: int) -> None:
    if not 0 <= index < len(series):
        raise IndexOutOfRange(f"index {index} outside series of length {len(series)}")


def from_records(records: Iterable[tuple[dt.date, float]]) -> DailySeries:
    """Build a validated series from ``(date, value)`` pairs in any order.

    Raises
    ------
    DuplicateDateError, GapError, NonPositiveError
        ``position`` on the exception is the offending record's rank after
        sorting by date, so callers can map it back to a source line.
    """
    items = sorted(((d, v) for d, v in records), key=lambda r: r[0])
    if not items:
        raise InputError("no records")
    for pos in range(1, len(items)):
        prev, cur = items[pos - 1][0], items[pos][0]
        if cur == prev:
            raise DuplicateDateError(cur, pos)
        if cur != prev + ONE_DAY:
            raise GapError(prev + ONE_DAY, pos)
    values = [float(v) for _, v in items]
    for i, v in enumerate(values):
        if not (math.isfinite(v) and v > 0):
            raise NonPositiveError(i, v)
    return DailySeries(items[0][0], np.asarray(values))


def weekday_of(series: DailySeries, index: int) -> int:
    _check_index(series, index)
    return (series.start_date.weekday() + index) % PERIOD


def day_index(series: DailySeries, index: int) -> DayIndex:
    return DayIndex(index, weekday_of(series, index))


def week_bounds(series: DailySeries, index: int) -> tuple[int, int]:
    """Half-open index range of the Monday-anchored calendar week holding ``index``.

    The range may extend past either end of the series.
    """
    start = index - weekday_of(series, index)
    return start, start + PERIOD


def as_series(values: Sequence[float], start_date: dt.date | str = "2022-01-03") -> DailySeries:
    """Convenience constructor; the default start is a Monday."""
    if isinstance(start_date, str):
        start_date = dt.date.fromisoformat(start_date)
    return DailySeries(start_date, np.asarray(values, dtype=float))
