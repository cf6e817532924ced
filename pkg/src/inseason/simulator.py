"""Seeded synthetic daily series with a weekly pattern and labeled anomalies.

Generative model::

    clean[t] = (trend_base + trend_slope * t) * season_profile[weekday(t)]
    value[t] = clean[t] * exp(noise_sigma * eps[t]),   eps ~ N(0, 1)

Anomalies are applied after noise:

* ``spike`` multiplies the point by ``magnitude``,
* ``dip`` divides it by ``magnitude``,
* ``in_season_shift`` replaces the clean value by the clean value of the
  target weekday in the same Monday-anchored week, then re-applies the
  point's own noise draw. The result sits inside the week's range but is
  wrong for its own weekday.

Randomness comes from numpy's PCG64 bit generator seeded with ``seed``; one
standard normal is drawn per day in index order. ``GENERATOR`` names that
scheme and must change if it ever does, since golden files depend on it.
"""
from __future__ import annotations

import datetime as dt
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .decomposition import MIN_LENGTH
from .errors import ConfigError, IncompleteWeekError, IndexOutOfRange
from .series import PERIOD, DailySeries, week_bounds, weekday_of

GENERATOR = "numpy-pcg64-standard_normal/v1"
PROFILE_TOL = 1e-12


class AnomalyKind(str, enum.Enum):
    SPIKE = "spike"
    DIP = "dip"
    IN_SEASON_SHIFT = "in_season_shift"


@dataclass(frozen=True)
class AnomalySpec:
    """One injected anomaly.

    For ``spike``/``dip`` ``magnitude`` is a factor > 1; for
    ``in_season_shift`` it is the target weekday (0..6).
    """

    index: int
    kind: AnomalyKind
    magnitude: float

    def __post_init__(self):
        try:
            kind = AnomalyKind(self.kind)
        except ValueError:
            raise ConfigError(
                f"anomaly kind must be one of {[k.value for k in AnomalyKind]}, got {self.kind!r}"
            ) from None
        object.__setattr__(self, "kind", kind)
        if isinstance(self.index, bool) or not isinstance(self.index, (int, np.integer)) or self.index < 0:
            raise ConfigError(f"anomaly index must be a non-negative integer, got {self.index!r}")
        object.__setattr__(self, "index", int(self.index))
        if kind is AnomalyKind.IN_SEASON_SHIFT:
            m = self.magnitude
            if isinstance(m, bool) or m != int(m) or not 0 <= m < PERIOD:
                raise ConfigError(f"in_season_shift magnitude must be a weekday 0..6, got {m!r}")
            object.__setattr__(self, "magnitude", int(m))
        else:
            m = float(self.magnitude)
            if not (math.isfinite(m) and m > 1):
                raise ConfigError(f"{kind.value} magnitude must be a finite factor > 1, got {self.magnitude!r}")
            object.__setattr__(self, "magnitude", m)

    @property
    def target_weekday(self) -> int:
        if self.kind is not AnomalyKind.IN_SEASON_SHIFT:
            raise AttributeError("only in_season_shift anomalies have a target weekday")
        return int(self.magnitude)


@dataclass(frozen=True)
class SimConfig:
    length: int
    start_date: dt.date
    trend_base: float
    trend_slope: float
    season_profile: tuple[float, ...]
    noise_sigma: float
    anomalies: tuple[AnomalySpec, ...] = ()
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.start_date, str):
            object.__setattr__(self, "start_date", dt.date.fromisoformat(self.start_date))
        object.__setattr__(self, "season_profile", tuple(float(s) for s in self.season_profile))
        object.__setattr__(self, "anomalies", tuple(self.anomalies))
        self.validate()

    def validate(self) -> None:
        if isinstance(self.length, bool) or not isinstance(self.length, (int, np.integer)) or self.length < MIN_LENGTH:
            raise ConfigError(f"length must be an integer >= {MIN_LENGTH}, got {self.length!r}")
        if not isinstance(self.start_date, dt.date):
            raise ConfigError(f"start_date must be a date, got {self.start_date!r}")
        if len(self.season_profile) != PERIOD:
            raise ConfigError(f"season_profile must have {PERIOD} entries, got {len(self.season_profile)}")
        if not all(math.isfinite(s) and s > 0 for s in self.season_profile):
            raise ConfigError("season_profile entries must be finite and positive")
        mean = math.fsum(self.season_profile) / PERIOD
        if abs(mean - 1.0) > PROFILE_TOL:
            raise ConfigError(f"season_profile must have mean 1 (within {PROFILE_TOL}), got mean {mean!r}")
        if not (math.isfinite(self.trend_base) and math.isfinite(self.trend_slope)):
            raise ConfigError("trend_base and trend_slope must be finite")
        last = self.trend_base + self.trend_slope * (self.length - 1)
        if self.trend_base <= 0 or last <= 0:
            raise ConfigError("trend_base + trend_slope * t must stay positive for every day")
        if not (math.isfinite(self.noise_sigma) and self.noise_sigma >= 0):
            raise ConfigError(f"noise_sigma must be non-negative, got {self.noise_sigma!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

        seen = set()
        start_wd = self.start_date.weekday()
        for spec in self.anomalies:
            if not isinstance(spec, AnomalySpec):
                raise ConfigError(f"anomalies must be AnomalySpec instances, got {spec!r}")
            if spec.index >= self.length:
                raise ConfigError(f"anomaly index {spec.index} outside series of length {self.length}")
            if spec.index in seen:
                raise ConfigError(f"more than one anomaly at index {spec.index}")
            seen.add(spec.index)
            if spec.kind is AnomalyKind.IN_SEASON_SHIFT:
                wd = (start_wd + spec.index) % PERIOD
                if spec.target_weekday == wd:
                    raise ConfigError(
                        f"in_season_shift at index {spec.index} targets its own weekday {wd}"
                    )
                target = spec.index - wd + spec.target_weekday
                if not 0 <= target < self.length:
                    raise ConfigError(
                        f"in_season_shift at index {spec.index} targets day {target}, outside the series"
                    )


@dataclass(frozen=True, eq=False)
class LabeledSeries:
    series: DailySeries
    labels: np.ndarray
    specs: tuple[AnomalySpec, ...] = field(default=())

    def __post_init__(self):
        labels = np.array(self.labels, dtype=bool)
        if labels.shape != (len(self.series),):
            raise ConfigError(f"expected {len(self.series)} labels, got {labels.shape}")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def anomaly_indices(self) -> list[int]:
        return np.flatnonzero(self.labels).tolist()


def clean_values(config: SimConfig) -> np.ndarray:
    """Noise- and anomaly-free expected values."""
    t = np.arange(config.length)
    weekdays = (config.start_date.weekday() + t) % PERIOD
    return (config.trend_base + config.trend_slope * t) * np.asarray(config.season_profile)[weekdays]


def simulate(config: SimConfig) -> LabeledSeries:
    config.validate()
    rng = np.random.Generator(np.random.PCG64(config.seed))
    eps = rng.standard_normal(config.length)
    noise = np.exp(config.noise_sigma * eps)
    clean = clean_values(config)
    values = clean * noise

    start_wd = config.start_date.weekday()
    labels = np.zeros(config.length, dtype=bool)
    for spec in config.anomalies:
        i = spec.index
        if spec.kind is AnomalyKind.SPIKE:
            values[i] *= spec.magnitude
        elif spec.kind is AnomalyKind.DIP:
            values[i] /= spec.magnitude
        else:
            wd = (start_wd + i) % PERIOD
            values[i] = clean[i - wd + spec.target_weekday] * noise[i]
        labels[i] = True

    return LabeledSeries(DailySeries(config.start_date, values), labels, config.anomalies)


def weekly_range_check(series: DailySeries, index: int) -> bool:
    """True iff the point lies within [min, max] of the other six days of its week.

    Weeks are Monday-anchored calendar weeks and must lie fully inside the
    series.
    """
    if not 0 <= index < len(series):
        raise IndexOutOfRange(f"index {index} outside series of length {len(series)}")
    lo, hi = week_bounds(series, index)
    if lo < 0 or hi > len(series):
        raise IncompleteWeekError(
            f"week of index {index} (weekday {weekday_of(series, index)}) spans days "
            f"{lo}..{hi - 1}, not all inside the series"
        )
    week = series.values[lo:hi]
    others = np.delete(week, index - lo)
    value = series.values[index]
    return bool(others.min() <= value <= others.max())
