"""Multiplicative trend / weekly-season / residual decomposition.

Model: ``value = trend * season[weekday] * resid``.

The trend is a centered 7-point moving average. Because the window is odd
no half weights are needed. The three points at each end, where the window
does not fit, are filled by extrapolating a least-squares line through the
nearest seven averaged values, so the latest day can always be scored.

Seasonal indices are the per-weekday means of ``value / trend``, rescaled to
average exactly one. A single such pass is biased when the trend has a slope
(the window mixes weekdays with unequal weights along the slope), so the
trend is re-estimated from the deseasonalised series a fixed number of times.
Each pass is a contraction and ``refine=10`` reaches machine precision on
noise-free affine-trend input. ``refine=0`` gives the textbook single pass.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import LengthMismatch, TooShortError
from .series import PERIOD, DailySeries

MIN_LENGTH = 2 * PERIOD
HALF_WINDOW = PERIOD // 2
EDGE_FIT_POINTS = PERIOD
DEFAULT_REFINE = 10


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Components of one series.

    Attributes
    ----------
    trend : ndarray
        Per-point level, same units as the series.
    season : ndarray of shape (7,)
        Dimensionless seasonal index per ISO weekday (Monday = 0), mean 1.
    resid : ndarray
        Per-point ratio ``value / (trend * season[weekday])``.
    weekdays : ndarray of int
        Weekday of every point, kept so scoring does not need the series.
    """

    trend: np.ndarray
    season: np.ndarray
    resid: np.ndarray
    weekdays: np.ndarray

    def __post_init__(self):
        for name in ("trend", "season", "resid", "weekdays"):
            getattr(self, name).setflags(write=False)

    def __len__(self):
        return len(self.trend)

    @property
    def seasonal(self) -> np.ndarray:
        """Seasonal index expanded to every point."""
        return self.season[self.weekdays]

    @property
    def v_p(self) -> np.ndarray:
        return self.trend * self.seasonal

    @property
    def v_max(self) -> np.ndarray:
        return self.trend * self.season.max()

    @property
    def v_min(self) -> np.ndarray:
        return self.trend * self.season.min()


def _edge_line(x: np.ndarray, y: np.ndarray, at: np.ndarray) -> np.ndarray:
    # closed-form least squares; x is a short integer run so centering keeps it exact
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    slope = (dx * (y - ym)).sum() / (dx * dx).sum()
    return ym + slope * (at - xm)


def moving_trend(values: np.ndarray) -> np.ndarray:
    """Centered 7-point average with least-squares linear extension at both ends.

    Extrapolated edge points that would be non-positive fall back to the
    nearest averaged value.
    """
    n = len(values)
    trend = np.empty(n)
    inner = sliding_window_view(values, PERIOD).mean(axis=1)
    trend[HALF_WINDOW : n - HALF_WINDOW] = inner

    idx = np.arange(n, dtype=float)
    head = slice(HALF_WINDOW, HALF_WINDOW + EDGE_FIT_POINTS)
    tail = slice(n - HALF_WINDOW - EDGE_FIT_POINTS, n - HALF_WINDOW)
    trend[:HALF_WINDOW] = _edge_line(idx[head], trend[head], idx[:HALF_WINDOW])
    trend[n - HALF_WINDOW :] = _edge_line(idx[tail], trend[tail], idx[n - HALF_WINDOW :])

    if (trend[:HALF_WINDOW] <= 0).any():
        trend[:HALF_WINDOW] = inner[0]
    if (trend[n - HALF_WINDOW :] <= 0).any():
        trend[n - HALF_WINDOW :] = inner[-1]
    return trend


def seasonal_indices(ratios: np.ndarray, weekdays: np.ndarray) -> np.ndarray:
    """Per-weekday mean of ``ratios``, normalised to mean one."""
    sums = np.bincount(weekdays, weights=ratios, minlength=PERIOD)
    counts = np.bincount(weekdays, minlength=PERIOD)
    season = sums / counts
    return season / season.mean()


def decompose(series: DailySeries, refine: int = DEFAULT_REFINE) -> Decomposition:
    """Split ``series`` into trend, weekly seasonal indices and residual ratios.

    Parameters
    ----------
    series : DailySeries
        At least 14 days.
    refine : int
        Number of trend re-estimation passes on the deseasonalised series.

    Returns
    -------
    Decomposition
    """
    n = len(series)
    if n < MIN_LENGTH:
        raise TooShortError(f"decomposition needs at least {MIN_LENGTH} days, got {n}")
    if refine < 0:
        raise ValueError("refine must be non-negative")

    values = series.values
    weekdays = series.weekdays
    trend = moving_trend(values)
    season = seasonal_indices(values / trend, weekdays)
    for _ in range(refine):
        trend = moving_trend(values / season[weekdays])
        season = seasonal_indices(values / trend, weekdays)

    resid = values / (trend * season[weekdays])
    return Decomposition(trend=trend, season=season, resid=resid, weekdays=weekdays)


def predicted(dec: Decomposition, series: DailySeries) -> np.ndarray:
    """Predicted value ``trend * season[weekday]`` for every day of ``series``."""
    if len(dec) != len(series) or not np.array_equal(dec.weekdays, series.weekdays):
        raise LengthMismatch(
            f"decomposition covers {len(dec)} days, series has {len(series)} "
            "(or the weekday alignment differs)"
        )
    return dec.v_p
