"""SVG figures: detection chart, decomposition panels and the (z, k) grid.

Figures are built on bare :class:`~matplotlib.figure.Figure` objects (no
pyplot state) and rendered with a fixed hash salt and no timestamp, so the
same input always gives the same SVG text. Key artists carry SVG ids
(``actual``, ``predicted``, ``decision-band``, ``anomalies``) that tests and
downstream tools can look up.
"""
from __future__ import annotations

import html
import io
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

from .decomposition import Decomposition
from .detector import DetectionResult, DetectorConfig, decision_bounds
from .formats import atomic_write
from .series import DailySeries

STYLE = {
    "svg.hashsalt": "inseason",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.2,
    "date.autoformatter.day": "%m-%d",
}

ACTUAL = "#1f77b4"
PREDICTED = "#ff7f0e"
BAND = "0.82"
FLAG = "#d62728"


def svg_bytes(fig: Figure) -> bytes:
    buf = io.BytesIO()
    with matplotlib.rc_context(STYLE):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def save_svg(fig: Figure, path) -> None:
    atomic_write(path, svg_bytes(fig))


def _detection_axes(ax, series: DailySeries, dec: Decomposition, result: DetectionResult, compact=False):
    dates = series.dates
    lower, upper = decision_bounds(dec, DetectorConfig(result.z, result.k))
    band = ax.fill_between(dates, lower, upper, color=BAND, linewidth=0, label="decision boundary")
    band.set_gid("decision-band")
    (actual,) = ax.plot(dates, series.values, color=ACTUAL, label="actual")
    actual.set_gid("actual")
    (pred,) = ax.plot(dates, dec.v_p, color=PREDICTED, label="predicted")
    pred.set_gid("predicted")
    idx = result.anomaly_indices
    circles = ax.scatter(
        [dates[i] for i in idx],
        series.values[idx],
        s=30 if compact else 80,
        facecolors="none",
        edgecolors=FLAG,
        linewidths=1.4,
        zorder=5,
        label="anomaly",
    )
    circles.set_gid("anomalies")
    return ax


def detection_figure(series: DailySeries, dec: Decomposition, result: DetectionResult, title=None) -> Figure:
    """Actual vs predicted with the shaded decision band and circled anomalies."""
    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(10, 4))
        ax = fig.add_subplot()
        _detection_axes(ax, series, dec, result)
        n = len(result.anomaly_indices)
        caption = f"z={result.z:.2f}, k={result.k:.2f}, thresh={result.thresh:.4f}: {n} anomalies"
        ax.set_title(f"{title}\n{caption}" if title else caption)
        ax.set_ylabel("value")
        ax.legend(loc="upper left", bbox_to_anchor=(1.0, 1.0), frameon=False)
        fig.autofmt_xdate()
        fig.tight_layout()
    return fig


def decomposition_figure(series: DailySeries, dec: Decomposition) -> Figure:
    """Four stacked panels: series, trend, seasonal index, residual."""
    dates = series.dates
    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(10, 7))
        axes = fig.subplots(4, 1, sharex=True)
        panels = [
            ("original", series.values),
            ("trend", dec.trend),
            ("season", dec.seasonal),
            ("resid", dec.resid),
        ]
        for ax, (name, y) in zip(axes, panels):
            (line,) = ax.plot(dates, y, color=ACTUAL)
            line.set_gid(name)
            ax.set_ylabel(name)
        axes[3].axhline(1.0, color="0.5", linewidth=0.8)
        fig.autofmt_xdate()
        fig.tight_layout()
    return fig


def grid_figure(series: DailySeries, dec: Decomposition, results: dict) -> Figure:
    """Small multiples, one detection chart per (z, k); rows are z, columns k.

    ``results`` maps ``(z, k)`` to :class:`DetectionResult`.
    """
    zs = sorted({z for z, _ in results})
    ks = sorted({k for _, k in results})
    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(3.2 * len(ks), 2.2 * len(zs)))
        axes = fig.subplots(len(zs), len(ks), sharex=True, squeeze=False)
        for r, z in enumerate(zs):
            for c, k in enumerate(ks):
                ax = axes[r][c]
                res = results.get((z, k))
                if res is None:
                    ax.set_axis_off()
                    continue
                _detection_axes(ax, series, dec, res, compact=True)
                ax.set_title(f"z={z:.2f} k={k:.2f} ({len(res.anomaly_indices)})", fontsize=8)
                ax.tick_params(labelbottom=False, labelleft=False)
        fig.tight_layout()
    return fig


def cell_filename(z: float, k: float) -> str:
    return f"cell_z{z:.2f}_k{k:.2f}.svg"


def write_sweep_charts(series: DailySeries, dec: Decomposition, report, results: dict, out_dir) -> list[Path]:
    """Per-cell SVGs, a combined ``grid.svg`` and an ``index.html`` table."""
    out_dir = Path(out_dir)
    written = []
    for (z, k), res in results.items():
        path = out_dir / cell_filename(z, k)
        save_svg(detection_figure(series, dec, res), path)
        written.append(path)
    grid_path = out_dir / "grid.svg"
    save_svg(grid_figure(series, dec, results), grid_path)
    written.append(grid_path)

    zs = sorted({z for z, _ in results})
    ks = sorted({k for _, k in results})
    rows = ["<tr><th>z \\ k</th>" + "".join(f"<th>{k:.2f}</th>" for k in ks) + "</tr>"]
    for z in zs:
        tds = []
        for k in ks:
            cell = report.cell(z, k)
            mark = " class=\"selected\"" if (z, k) == tuple(report.selected) else ""
            name = html.escape(cell_filename(z, k))
            tds.append(
                f"<td{mark}><a href=\"{name}\"><img src=\"{name}\" width=\"320\"></a><br>"
                f"P={cell.precision:.3f} R={cell.recall:.3f} F1={cell.f1:.3f} "
                f"flagged={len(cell.flagged)}</td>"
            )
        rows.append(f"<tr><th>{z:.2f}</th>" + "".join(tds) + "</tr>")
    sel_z, sel_k = report.selected
    page = (
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>(z, k) sweep</title>\n"
        "<style>td.selected{outline:3px solid #d62728} td,th{padding:4px;font:12px sans-serif}</style>"
        "</head><body>\n"
        f"<h1>(z, k) sweep</h1><p>selected: z={sel_z:.2f}, k={sel_k:.2f} "
        f"by {html.escape(report.metric)}; series {html.escape(report.series_fingerprint)}</p>\n"
        f"<p><a href=\"grid.svg\">combined grid</a></p>\n<table>\n" + "\n".join(rows) + "\n</table></body></html>\n"
    )
    index = out_dir / "index.html"
    atomic_write(index, page)
    written.append(index)
    return written
