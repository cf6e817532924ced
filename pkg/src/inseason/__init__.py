"""Anomaly detection for daily series with a weekly pattern.

Multiplicative decomposition plus a residual z-threshold, with the
k-parameter adjustment that tolerates values lying inside their week's
range but off for their weekday.
"""
from .decomposition import Decomposition, decompose, predicted
from .detector import (
    DetectionResult,
    DetectorConfig,
    PointScore,
    adjusted_predictions,
    classical_detect,
    decision_bounds,
    detect,
    k_detect,
    k_ratio,
)
from .series import DailySeries, DayIndex, from_records, weekday_of
from .simulator import AnomalyKind, AnomalySpec, LabeledSeries, SimConfig, simulate, weekly_range_check
from .tuning import CellResult, GridSpec, SweepReport, confusion, select, sweep

__version__ = "0.1.0"

__all__ = [
    "AnomalyKind",
    "AnomalySpec",
    "CellResult",
    "DailySeries",
    "DayIndex",
    "Decomposition",
    "DetectionResult",
    "DetectorConfig",
    "GridSpec",
    "LabeledSeries",
    "PointScore",
    "SimConfig",
    "SweepReport",
    "adjusted_predictions",
    "classical_detect",
    "confusion",
    "decision_bounds",
    "decompose",
    "detect",
    "from_records",
    "k_detect",
    "k_ratio",
    "predicted",
    "select",
    "simulate",
    "sweep",
    "weekday_of",
    "weekly_range_check",
]
