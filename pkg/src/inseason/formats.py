"""File formats: series/labels/result CSVs and the JSON documents.

All writers return text and all file output goes through
:func:`atomic_write`, so an interrupted run never leaves a truncated file.
Reals are written with 12 significant digits, which round-trips every input
value of the series CSV exactly.
"""
from __future__ import annotations

import csv
import datetime as dt
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .decomposition import Decomposition
from .detector import DetectionResult
from .errors import ConfigError, FormatError, InputError, LengthMismatch
from .series import DailySeries, from_records
from .simulator import AnomalySpec, LabeledSeries, SimConfig
from .tuning import CellResult, GridSpec, SweepReport

SCHEMA_VERSION = 1
SERIES_HEADER = ["date", "value"]
LABELS_HEADER = ["date", "label"]
RESULT_HEADER = ["date", "value", "v_p", "vp_high", "vp_low", "p_high", "p_low", "p", "is_anomaly"]
DECOMPOSITION_HEADER = ["date", "value", "trend", "season", "resid"]
REAL_DIGITS = 12


def fmt_real(x: float) -> str:
    return f"{x:.{REAL_DIGITS}g}"


def atomic_write(path, data: str | bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _read_rows(text: str, header: list[str], path=None):
    """Yield ``(line_no, row)`` after checking the header; blank lines are skipped."""
    reader = csv.reader(io.StringIO(text))
    try:
        first = next(reader)
    except StopIteration:
        raise FormatError("empty file", line=1, path=path) from None
    if [c.strip().lstrip("﻿") for c in first] != header:
        raise FormatError(f"expected header {','.join(header)!r}, got {','.join(first)!r}", line=1, path=path)
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise FormatError(f"expected {len(header)} fields, got {len(row)}", line=reader.line_num, path=path)
        yield reader.line_num, [c.strip() for c in row]


def _parse_date(s: str, line: int, path) -> dt.date:
    try:
        return dt.date.fromisoformat(s)
    except ValueError:
        raise FormatError(f"invalid ISO-8601 date {s!r}", line=line, path=path) from None


# -- series ------------------------------------------------------------------


def parse_series_csv(text: str, path=None) -> DailySeries:
    records, lines = [], []
    for line, (d, v) in _read_rows(text, SERIES_HEADER, path):
        date = _parse_date(d, line, path)
        try:
            value = float(v)
        except ValueError:
            raise FormatError(f"invalid number {v!r}", line=line, path=path) from None
        records.append((date, value))
        lines.append(line)
    if not records:
        raise FormatError("no data rows", line=2, path=path)

    order = sorted(range(len(records)), key=lambda i: records[i][0])
    try:
        return from_records(records[i] for i in order)
    except InputError as exc:
        pos = getattr(exc, "position", None)
        line = lines[order[pos]] if pos is not None else None
        raise FormatError(str(exc), line=line, path=path) from exc


def read_series_csv(path) -> DailySeries:
    return parse_series_csv(Path(path).read_text(encoding="utf-8"), path=path)


def series_csv_text(series: DailySeries) -> str:
    return _csv_text(SERIES_HEADER, ((d.isoformat(), fmt_real(v)) for d, v in series.records()))


# -- labels ------------------------------------------------------------------


def labels_csv_text(labeled: LabeledSeries) -> str:
    rows = ((d.isoformat(), int(flag)) for d, flag in zip(labeled.series.dates, labeled.labels))
    return _csv_text(LABELS_HEADER, rows)


def parse_labels_csv(text: str, series: DailySeries, path=None) -> LabeledSeries:
    """Labels aligned to ``series``; dates must match day for day."""
    labels = []
    expected = series.dates
    for line, (d, flag) in _read_rows(text, LABELS_HEADER, path):
        date = _parse_date(d, line, path)
        pos = len(labels)
        if pos >= len(expected):
            raise LengthMismatch(f"{path or 'labels'}:{line}: more labels than series days ({len(expected)})")
        if date != expected[pos]:
            raise FormatError(f"expected date {expected[pos].isoformat()}, got {d}", line=line, path=path)
        if flag not in ("0", "1"):
            raise FormatError(f"label must be 0 or 1, got {flag!r}", line=line, path=path)
        labels.append(flag == "1")
    if len(labels) != len(expected):
        raise LengthMismatch(f"{path or 'labels'}: {len(labels)} labels for a series of {len(expected)} days")
    return LabeledSeries(series, np.array(labels))


def read_labels_csv(path, series: DailySeries) -> LabeledSeries:
    return parse_labels_csv(Path(path).read_text(encoding="utf-8"), series, path=path)


# -- detection results -------------------------------------------------------


def result_csv_text(series: DailySeries, result: DetectionResult) -> str:
    a = result.arrays
    cols = [a[name].tolist() for name in RESULT_HEADER[2:-1]]
    rows = []
    for i, (d, v) in enumerate(series.records()):
        rows.append(
            [d.isoformat(), fmt_real(v)]
            + [fmt_real(c[i]) for c in cols]
            + [int(a["is_anomaly"][i])]
        )
    return _csv_text(RESULT_HEADER, rows)


def result_sidecar(series: DailySeries, result: DetectionResult) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "z": result.z,
        "k": result.k,
        "thresh": result.thresh,
        "n_points": len(series),
        "anomalies": [series.date_at(i).isoformat() for i in result.anomaly_indices],
    }


def sidecar_path(result_path) -> Path:
    """``out.csv`` -> ``out.meta.json``."""
    p = Path(result_path)
    return p.with_name(p.stem + ".meta.json")


def decomposition_csv_text(series: DailySeries, dec: Decomposition) -> str:
    seasonal = dec.seasonal
    rows = (
        [d.isoformat(), fmt_real(v), fmt_real(t), fmt_real(s), fmt_real(r)]
        for (d, v), t, s, r in zip(series.records(), dec.trend.tolist(), seasonal.tolist(), dec.resid.tolist())
    )
    return _csv_text(DECOMPOSITION_HEADER, rows)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


# -- simulator config --------------------------------------------------------

_SIM_FIELDS = {"length", "start_date", "trend_base", "trend_slope", "season_profile", "noise_sigma", "seed"}


def _field(doc: dict, name: str, types, where="config"):
    if name not in doc:
        raise ConfigError(f"{where}: missing field {name!r}")
    value = doc[name]
    if isinstance(value, bool) or not isinstance(value, types):
        raise ConfigError(f"{where}: field {name!r} has invalid type {type(value).__name__}")
    return value


def sim_config_from_dict(doc: dict) -> SimConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    unknown = set(doc) - _SIM_FIELDS - {"schema_version", "anomalies"}
    if unknown:
        raise ConfigError(f"config: unknown field(s) {sorted(unknown)}")

    num = (int, float)
    profile = _field(doc, "season_profile", list)
    for i, s in enumerate(profile):
        if isinstance(s, bool) or not isinstance(s, num):
            raise ConfigError(f"config: season_profile[{i}] is not a number")
    start = _field(doc, "start_date", str)
    try:
        start_date = dt.date.fromisoformat(start)
    except ValueError:
        raise ConfigError(f"config: field 'start_date' is not an ISO date: {start!r}") from None

    anomalies = []
    for i, a in enumerate(doc.get("anomalies", [])):
        where = f"anomalies[{i}]"
        if not isinstance(a, dict):
            raise ConfigError(f"{where}: must be an object")
        extra = set(a) - {"index", "kind", "magnitude"}
        if extra:
            raise ConfigError(f"{where}: unknown field(s) {sorted(extra)}")
        try:
            anomalies.append(
                AnomalySpec(
                    index=_field(a, "index", int, where),
                    kind=_field(a, "kind", str, where),
                    magnitude=_field(a, "magnitude", num, where),
                )
            )
        except ConfigError as exc:
            msg = str(exc)
            raise ConfigError(msg if msg.startswith(where) else f"{where}: {msg}") from None

    return SimConfig(
        length=_field(doc, "length", int),
        start_date=start_date,
        trend_base=float(_field(doc, "trend_base", num)),
        trend_slope=float(_field(doc, "trend_slope", num)),
        season_profile=tuple(float(s) for s in profile),
        noise_sigma=float(_field(doc, "noise_sigma", num)),
        anomalies=tuple(anomalies),
        seed=_field(doc, "seed", int),
    )


def load_sim_config(path) -> SimConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno, path=path) from None
    return sim_config_from_dict(doc)


def sim_config_to_dict(config: SimConfig) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "length": config.length,
        "start_date": config.start_date.isoformat(),
        "trend_base": config.trend_base,
        "trend_slope": config.trend_slope,
        "season_profile": list(config.season_profile),
        "noise_sigma": config.noise_sigma,
        "seed": config.seed,
        "anomalies": [
            {"index": a.index, "kind": a.kind.value, "magnitude": a.magnitude} for a in config.anomalies
        ],
    }


# -- sweep report ------------------------------------------------------------


def sweep_report_to_dict(report: SweepReport, grid: GridSpec | None = None) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "series_fingerprint": report.series_fingerprint,
        "metric": report.metric,
        "selected": {"z": report.selected[0], "k": report.selected[1]},
    }
    if grid is not None:
        doc["grid"] = {"z_values": list(grid.z_values), "k_values": list(grid.k_values)}
    doc["cells"] = [
        {
            "z": c.z,
            "k": c.k,
            "tp": c.tp,
            "fp": c.fp,
            "fn": c.fn,
            "tn": c.tn,
            "precision": c.precision,
            "recall": c.recall,
            "f1": c.f1,
            "flagged": list(c.flagged),
        }
        for c in report.cells
    ]
    return doc


def sweep_report_from_dict(doc: dict) -> SweepReport:
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {doc.get('schema_version')!r}")
    cells = tuple(
        CellResult(
            z=c["z"], k=c["k"], tp=c["tp"], fp=c["fp"], fn=c["fn"], tn=c["tn"],
            precision=c["precision"], recall=c["recall"], f1=c["f1"], flagged=tuple(c["flagged"]),
        )
        for c in doc["cells"]
    )
    sel = doc["selected"]
    return SweepReport(cells, (sel["z"], sel["k"]), doc["series_fingerprint"], doc.get("metric", "f1"))
