"""Command line entry point.

Exit codes: 0 success, 2 invalid input or parameters, 3 degenerate data
(zero residual variance).
"""
from __future__ import annotations

import argparse
import sys

from . import formats, tuning
from .decomposition import decompose
from .detector import DetectorConfig, k_detect
from .errors import DegenerateDataError, InputError
from .simulator import simulate

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def cmd_simulate(args) -> int:
    config = formats.load_sim_config(args.config)
    labeled = simulate(config)
    formats.atomic_write(args.out_series, formats.series_csv_text(labeled.series))
    formats.atomic_write(args.out_labels, formats.labels_csv_text(labeled))
    print(f"simulated {config.length} days from {config.start_date} with {len(config.anomalies)} injected anomalies")
    return EXIT_OK


def cmd_decompose(args) -> int:
    series = formats.read_series_csv(args.series)
    dec = decompose(series)
    formats.atomic_write(args.out, formats.decomposition_csv_text(series, dec))
    if args.svg:
        from .plotting import decomposition_figure, save_svg

        save_svg(decomposition_figure(series, dec), args.svg)
    season = " ".join(f"{s:.4f}" for s in dec.season)
    print(f"seasonal indices (Mon..Sun): {season}")
    return EXIT_OK


def cmd_detect(args) -> int:
    config = DetectorConfig(args.z, args.k)
    series = formats.read_series_csv(args.series)
    dec = decompose(series)
    result = k_detect(series, dec, config)
    formats.atomic_write(args.out, formats.result_csv_text(series, result))
    formats.atomic_write(formats.sidecar_path(args.out), formats.dumps(formats.result_sidecar(series, result)))
    if args.svg:
        from .plotting import detection_figure, save_svg

        save_svg(detection_figure(series, dec, result), args.svg)

    idx = result.anomaly_indices
    print(f"{len(idx)} anomalies (z={config.z:g}, k={config.k:g}, thresh={result.thresh:.6g})")
    for i in idx:
        print(f"  {series.date_at(i).isoformat()}  value={series.values[i]:.6g}  p={result.p[i]:.4f}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    grid = tuning.GridSpec(tuple(args.z_list), tuple(args.k_list))
    series = formats.read_series_csv(args.series)
    labeled = formats.read_labels_csv(args.labels, series)
    dec = decompose(series)
    report = tuning.sweep(labeled, dec, grid, metric=args.metric, workers=args.workers)
    formats.atomic_write(args.out, formats.dumps(formats.sweep_report_to_dict(report, grid)))
    if args.svg_grid:
        from .plotting import write_sweep_charts

        results = {(z, k): k_detect(series, dec, DetectorConfig(z, k)) for z, k in grid.cells()}
        write_sweep_charts(series, dec, report, results, args.svg_grid)

    best = report.selected_cell
    print(
        f"{len(report.cells)} cells; selected z={best.z:g}, k={best.k:g} "
        f"({report.metric}={best.metric(report.metric):.4f}, flagged={len(best.flagged)})"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inseason",
        description="Weekly-seasonal anomaly detection for daily series with k-parameter in-season suppression.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a labeled synthetic series from a JSON config")
    p.add_argument("config")
    p.add_argument("out_series")
    p.add_argument("out_labels")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("decompose", help="write trend/season/resid per day")
    p.add_argument("series")
    p.add_argument("out")
    p.add_argument("--svg", metavar="PATH", help="also write a four-panel decomposition chart")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("detect", help="score a series and flag anomalies")
    p.add_argument("series")
    p.add_argument("out")
    p.add_argument("--z", type=float, default=2.0, help="residual standard deviations (default 2.0)")
    p.add_argument("--k", type=float, default=0.0, help="in-season tolerance in [0, 1] (default 0.0)")
    p.add_argument("--svg", metavar="PATH", help="also write a detection chart")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("sweep", help="evaluate a (z, k) grid against labels and pick the best cell")
    p.add_argument("series")
    p.add_argument("labels")
    p.add_argument("out")
    p.add_argument("--z-list", type=_float_list, default=[1.5, 2.0, 2.5, 3.0])
    p.add_argument("--k-list", type=_float_list, default=[0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
    p.add_argument("--metric", choices=tuning.METRICS, default="f1")
    p.add_argument("--workers", type=int, default=None, help="evaluate cells on a thread pool")
    p.add_argument("--svg-grid", metavar="DIR", help="write per-cell charts, grid.svg and index.html")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
