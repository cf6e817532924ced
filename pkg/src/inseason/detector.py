"""Residual z-threshold detection and k-parameter in-season suppression.

Classical rule: with ``thresh = z * std(resid)`` a point is normal iff
``1 / (1 + thresh) <= resid <= 1 + thresh``.

The k-parameter rule replaces the single prediction ``v_p`` by two baselines
pulled toward the predicted weekly extremes::

    v_max = trend * max(season)         v_min = trend * min(season)
    r0_high = v_p / v_max               r0_low = v_min / v_p
    rk_high = r0_high ** (1 - k)        rk_low = r0_low ** (1 - k)
    vp_high = v_max * rk_high           vp_low = v_min / rk_low
    p_high = (v / vp_high) / (1 + thresh)
    p_low = 1 / ((v / vp_low) * (1 + thresh))
    p = max(p_high, p_low),  anomaly iff p > 1

so ``v_min <= vp_low <= v_p <= vp_high <= v_max``. At ``k = 0`` both
baselines equal ``v_p`` and the classical rule is recovered; at ``k = 1`` they
sit at the weekly extremes and the band runs parallel to the trend.

Note the low side divides by ``rk_low`` and both ``p`` terms are measured
against ``1 + thresh``; only this form reduces to the classical band at
``k = 0`` and keeps a perfect prediction at ``p = 1 / (1 + thresh) < 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from functools import cached_property

import numpy as np

from .decomposition import Decomposition, decompose
from .errors import DomainError, LengthMismatch, ZeroVarianceError
from .series import DailySeries

DEFAULT_Z = 2.0
DEFAULT_K = 0.0
# residuals are ratios near 1, so this is far below any real noise level
ZERO_STD = 1e-12


def _check_k(k: float) -> float:
    k = float(k)
    if not (0.0 <= k <= 1.0):
        raise DomainError(f"k must lie in [0, 1], got {k}")
    return k


def _check_z(z: float) -> float:
    z = float(z)
    if not (math.isfinite(z) and z > 0):
        raise DomainError(f"z must be a finite positive number, got {z}")
    return z


@dataclass(frozen=True)
class DetectorConfig:
    z: float = DEFAULT_Z
    k: float = DEFAULT_K

    def __post_init__(self):
        object.__setattr__(self, "z", _check_z(self.z))
        object.__setattr__(self, "k", _check_k(self.k))


@dataclass(frozen=True)
class PointScore:
    v_p: float
    v_max: float
    v_min: float
    r0_high: float
    r0_low: float
    rk_high: float
    rk_low: float
    vp_high: float
    vp_low: float
    resid_high: float
    resid_low: float
    p_high: float
    p_low: float
    p: float
    is_anomaly: bool


_SCORE_FIELDS = [f.name for f in fields(PointScore)]


@dataclass(frozen=True, eq=False)
class DetectionResult:
    """Scores for one (z, k) setting.

    Per-point quantities are held as arrays named after the
    :class:`PointScore` fields; ``scores`` materialises them as objects.
    """

    thresh: float
    z: float
    k: float
    arrays: dict

    @property
    def is_anomaly(self) -> np.ndarray:
        return self.arrays["is_anomaly"]

    @property
    def p(self) -> np.ndarray:
        return self.arrays["p"]

    @cached_property
    def anomaly_indices(self) -> list[int]:
        return np.flatnonzero(self.arrays["is_anomaly"]).tolist()

    @cached_property
    def scores(self) -> tuple[PointScore, ...]:
        cols = [self.arrays[name].tolist() for name in _SCORE_FIELDS]
        return tuple(PointScore(*row) for row in zip(*cols))

    def __len__(self):
        return len(self.arrays["p"])

    def __getitem__(self, index: int) -> PointScore:
        return self.scores[index]


def k_ratio(r0: float, k: float) -> float:
    """Adjusted ratio ``r0 ** (1 - k)``; never smaller than ``r0``."""
    k = _check_k(k)
    if not (0.0 < r0 <= 1.0):
        raise DomainError(f"ratio must lie in (0, 1], got {r0}")
    return r0 ** (1.0 - k)


def residual_threshold(resid: np.ndarray, z: float) -> float:
    """``z`` times the sample standard deviation (ddof=1) of the residuals."""
    z = _check_z(z)
    std = float(np.std(resid, ddof=1))
    if not std > ZERO_STD:
        raise ZeroVarianceError(
            f"residual standard deviation is {std:.3g}; the series is perfectly periodic "
            "and a z-threshold is undefined"
        )
    return z * std


def classify_residuals(resid: np.ndarray, thresh: float) -> np.ndarray:
    """Classical band test: True where ``resid`` falls outside the closed band."""
    resid = np.asarray(resid, dtype=float)
    upper = 1.0 + thresh
    return (resid > upper) | (resid < 1.0 / upper)


def score_points(values, v_p, v_max, v_min, thresh: float, k: float) -> dict:
    """Run the k-parameter chain on aligned arrays.

    All array arguments are per point and in value units; ``thresh`` is the
    already computed band half-width. Returns a dict of arrays keyed by the
    :class:`PointScore` field names.
    """
    k = _check_k(k)
    values = np.asarray(values, dtype=float)
    v_p = np.asarray(v_p, dtype=float)
    v_max = np.asarray(v_max, dtype=float)
    v_min = np.asarray(v_min, dtype=float)

    r0_high = v_p / v_max
    r0_low = v_min / v_p
    rk_high = r0_high ** (1.0 - k)
    rk_low = r0_low ** (1.0 - k)
    vp_high = v_max * rk_high
    vp_low = v_min / rk_low
    resid_high = values / vp_high
    resid_low = values / vp_low
    band = 1.0 + thresh
    p_high = resid_high / band
    p_low = 1.0 / (resid_low * band)
    p = np.maximum(p_high, p_low)
    return {
        "v_p": v_p,
        "v_max": v_max,
        "v_min": v_min,
        "r0_high": r0_high,
        "r0_low": r0_low,
        "rk_high": rk_high,
        "rk_low": rk_low,
        "vp_high": vp_high,
        "vp_low": vp_low,
        "resid_high": resid_high,
        "resid_low": resid_low,
        "p_high": p_high,
        "p_low": p_low,
        "p": p,
        "is_anomaly": p > 1.0,
    }


def _check_pair(series: DailySeries, dec: Decomposition) -> None:
    if len(series) != len(dec) or not np.array_equal(series.weekdays, dec.weekdays):
        raise LengthMismatch(
            f"decomposition covers {len(dec)} days, series has {len(series)} "
            "(or the weekday alignment differs)"
        )


def adjusted_predictions(dec: Decomposition, k: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-point ``(vp_high, vp_low)`` baselines for tolerance ``k``."""
    k = _check_k(k)
    v_max = dec.v_max
    v_min = dec.v_min
    rk_high = (dec.v_p / v_max) ** (1.0 - k)
    rk_low = (v_min / dec.v_p) ** (1.0 - k)
    return v_max * rk_high, v_min / rk_low


def classical_detect(series: DailySeries, dec: Decomposition, z: float = DEFAULT_Z) -> DetectionResult:
    """Flag points whose residual leaves ``[1/(1+thresh), 1+thresh]``.

    The returned scores carry the k = 0 chain; flags come from the band test
    on the stored residuals.
    """
    _check_pair(series, dec)
    thresh = residual_threshold(dec.resid, z)
    arrays = score_points(series.values, dec.v_p, dec.v_max, dec.v_min, thresh, 0.0)
    arrays["is_anomaly"] = classify_residuals(dec.resid, thresh)
    return DetectionResult(thresh=thresh, z=float(z), k=0.0, arrays=arrays)


def k_detect(series: DailySeries, dec: Decomposition, config: DetectorConfig) -> DetectionResult:
    """Score every point with the k-parameter chain and flag ``p > 1``."""
    _check_pair(series, dec)
    thresh = residual_threshold(dec.resid, config.z)
    arrays = score_points(series.values, dec.v_p, dec.v_max, dec.v_min, thresh, config.k)
    return DetectionResult(thresh=thresh, z=config.z, k=config.k, arrays=arrays)


def decision_bounds(dec: Decomposition, config: DetectorConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-point ``(lower, upper)`` in value units.

    A point is flagged by :func:`k_detect` iff its value lies outside the
    open interval ``(lower, upper)``.
    """
    thresh = residual_threshold(dec.resid, config.z)
    vp_high, vp_low = adjusted_predictions(dec, config.k)
    band = 1.0 + thresh
    return vp_low / band, vp_high * band


def detect(series: DailySeries, z: float = DEFAULT_Z, k: float = DEFAULT_K) -> tuple[Decomposition, DetectionResult]:
    dec = decompose(series)
    return dec, k_detect(series, dec, DetectorConfig(z, k))
