"""(z, k) grid sweep scored against ground-truth labels.

Each cell runs :func:`~inseason.detector.k_detect` on one shared
decomposition and is compared with the labels. :func:`select` picks the
cell with the best metric (F1 by default), breaking ties toward larger k
and then larger z, i.e. toward fewer alerts.
"""
from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .decomposition import Decomposition
from .detector import DetectorConfig, k_detect
from .errors import DomainError, IndexOutOfRange, LengthMismatch
from .series import DailySeries
from .simulator import LabeledSeries

METRICS = ("f1", "precision", "recall")


@dataclass(frozen=True)
class GridSpec:
    z_values: tuple[float, ...]
    k_values: tuple[float, ...]

    def __post_init__(self):
        z = tuple(float(v) for v in self.z_values)
        k = tuple(float(v) for v in self.k_values)
        if not z or not k:
            raise DomainError("grid needs at least one z and one k value")
        if any(not (math.isfinite(v) and v > 0) for v in z):
            raise DomainError(f"z values must be positive, got {list(z)}")
        if any(not 0 <= v <= 1 for v in k):
            raise DomainError(f"k values must lie in [0, 1], got {list(k)}")
        for name, vals in (("z", z), ("k", k)):
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise DomainError(f"{name} values must be strictly ascending, got {list(vals)}")
        object.__setattr__(self, "z_values", z)
        object.__setattr__(self, "k_values", k)

    def cells(self) -> list[tuple[float, float]]:
        """Grid points in z-major order."""
        return [(z, k) for z in self.z_values for k in self.k_values]

    def __len__(self):
        return len(self.z_values) * len(self.k_values)


@dataclass(frozen=True)
class CellResult:
    z: float
    k: float
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    flagged: tuple[int, ...]

    def metric(self, name: str) -> float:
        if name not in METRICS:
            raise DomainError(f"unknown metric {name!r}; choose from {METRICS}")
        return getattr(self, name)


@dataclass(frozen=True)
class SweepReport:
    cells: tuple[CellResult, ...]
    selected: tuple[float, float]
    series_fingerprint: str
    metric: str = "f1"

    def cell(self, z: float, k: float) -> CellResult:
        for c in self.cells:
            if c.z == z and c.k == k:
                return c
        raise KeyError((z, k))

    @property
    def selected_cell(self) -> CellResult:
        return self.cell(*self.selected)


def confusion(flagged, labels) -> tuple[int, int, int, int]:
    """``(tp, fp, fn, tn)`` of the flagged index set against boolean labels."""
    labels = np.asarray(labels, dtype=bool)
    n = len(labels)
    pred = np.zeros(n, dtype=bool)
    for i in flagged:
        if not 0 <= i < n:
            raise IndexOutOfRange(f"flagged index {i} outside series of length {n}")
        pred[i] = True
    tp = int(np.count_nonzero(pred & labels))
    fp = int(np.count_nonzero(pred & ~labels))
    fn = int(np.count_nonzero(~pred & labels))
    return tp, fp, fn, n - tp - fp - fn


def scores_from_counts(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    # empty prediction or empty truth counts as vacuously perfect on that axis
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    denom = precision + recall
    f1 = 2 * precision * recall / denom if denom else 0.0
    return precision, recall, f1


def fingerprint(series: DailySeries, labels=None) -> str:
    """SHA-256 over start date, raw float64 values and (optionally) labels."""
    h = hashlib.sha256()
    h.update(series.start_date.isoformat().encode())
    h.update(np.ascontiguousarray(series.values, dtype="<f8").tobytes())
    if labels is not None:
        h.update(np.asarray(labels, dtype=np.uint8).tobytes())
    return "sha256:" + h.hexdigest()


def _evaluate(series, dec, labels, z, k) -> CellResult:
    result = k_detect(series, dec, DetectorConfig(z, k))
    flagged = result.anomaly_indices
    tp, fp, fn, tn = confusion(flagged, labels)
    precision, recall, f1 = scores_from_counts(tp, fp, fn)
    return CellResult(z, k, tp, fp, fn, tn, precision, recall, f1, tuple(flagged))


def _rank(cell: CellResult, metric: str):
    return (cell.metric(metric), cell.k, cell.z)


def select(report: SweepReport, metric: str | None = None) -> tuple[float, float]:
    """Best ``(z, k)``: maximal metric, ties to larger k, then larger z."""
    if not report.cells:
        raise DomainError("empty sweep report")
    best = max(report.cells, key=lambda c: _rank(c, metric or report.metric))
    return best.z, best.k


def sweep(
    labeled: LabeledSeries,
    dec: Decomposition,
    grid: GridSpec,
    metric: str = "f1",
    workers: int | None = None,
) -> SweepReport:
    """Evaluate every grid cell; cells are returned in z-major order.

    ``workers > 1`` evaluates cells on a thread pool; the result is the same.
    """
    if metric not in METRICS:
        raise DomainError(f"unknown metric {metric!r}; choose from {METRICS}")
    series, labels = labeled.series, labeled.labels
    if len(dec) != len(series):
        raise LengthMismatch(f"decomposition covers {len(dec)} days, series has {len(series)}")

    points = grid.cells()
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(lambda zk: _evaluate(series, dec, labels, *zk), points))
    else:
        cells = [_evaluate(series, dec, labels, z, k) for z, k in points]

    best = max(cells, key=lambda c: _rank(c, metric))
    return SweepReport(
        cells=tuple(cells),
        selected=(best.z, best.k),
        series_fingerprint=fingerprint(series, labels),
        metric=metric,
    )
