"""Exit criteria. Each test prints one PASS/FAIL line in the acceptance summary.

Run alone with ``pytest tests/test_acceptance.py``.
"""
import csv
import dataclasses
import io
import json
import shutil
import statistics
import time

import numpy as np
import pytest

from helpers import (
    GOLDEN,
    MONDAY,
    PROFILE,
    SCENARIO_MILD,
    SCENARIO_SPIKE,
    SCENARIO_STRONG,
    data_path,
    random_config,
    random_labeled,
    scenario_config,
)
from inseason import formats
from inseason.cli import main
from inseason.decomposition import decompose
from inseason.detector import DetectorConfig, classical_detect, decision_bounds, k_detect
from inseason.series import DailySeries
from inseason.simulator import AnomalyKind, simulate, weekly_range_check
from inseason.tuning import GridSpec, select, sweep
from regen_goldens import SWEEP_K, SWEEP_Z, scenario_flags

K_GRID = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
acceptance = pytest.mark.acceptance


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.3f}s, budget {self.seconds}s"


@acceptance("AC1  k=0 classical equivalence, 1000 series, exact, < 10 s")
def test_ac1_k0_equivalence():
    sigmas, slopes = set(), set()
    with Budget(10.0):
        for seed in range(1000):
            cfg = random_config(seed)
            sigmas.add(cfg.noise_sigma)
            slopes.add(np.sign(cfg.trend_slope))
            ls = simulate(cfg)
            dec = decompose(ls.series)
            a = classical_detect(ls.series, dec, 2.0)
            b = k_detect(ls.series, dec, DetectorConfig(2.0, 0.0))
            assert a.anomaly_indices == b.anomaly_indices, seed
    assert sigmas == {0.02, 0.05, 0.1}
    assert slopes == {-1.0, 1.0}


@acceptance("AC2  monotone suppression over k, 200 series, exact containment, < 10 s")
def test_ac2_monotone_suppression():
    with Budget(10.0):
        for seed in range(200):
            ls = random_labeled(10_000 + seed)
            dec = decompose(ls.series)
            sets = [set(k_detect(ls.series, dec, DetectorConfig(2.0, k)).anomaly_indices) for k in K_GRID]
            for wide, narrow in zip(sets, sets[1:]):
                assert narrow <= wide, seed


@acceptance("AC3  v_min <= vp_low <= v_p <= vp_high <= v_max, 200 x 6, slack 1e-12 rel, < 5 s")
def test_ac3_ordering():
    with Budget(5.0):
        for seed in range(200):
            ls = random_labeled(20_000 + seed)
            dec = decompose(ls.series)
            for k in K_GRID:
                a = k_detect(ls.series, dec, DetectorConfig(2.0, k)).arrays
                chain = [a["v_min"], a["vp_low"], a["v_p"], a["vp_high"], a["v_max"]]
                for lo, hi in zip(chain, chain[1:]):
                    assert (lo <= hi * (1 + 1e-12)).all(), (seed, k)


@acceptance("AC4  k=1 boundary parallel to trend, 1e-9 rel, < 1 s")
def test_ac4_parallel_boundary():
    with Budget(1.0):
        for seed in range(20):
            ls = random_labeled(30_000 + seed)
            dec = decompose(ls.series)
            lower, upper = decision_bounds(dec, DetectorConfig(2.0, 1.0))
            for ratio in (upper / dec.trend, lower / dec.trend):
                assert np.abs(ratio / ratio[0] - 1).max() <= 1e-9


@acceptance("AC5  noise-free decomposition recovery (flat and affine trend x profile), 1e-6, < 1 s")
def test_ac5_decomposition_recovery():
    with Budget(1.0):
        t = np.arange(42)
        wd = t % 7
        trends = [np.full(42, 100.0), 100.0 + 0.8 * t, 500.0 - 3.0 * t]
        for trend in trends:
            s = DailySeries(MONDAY, trend * np.array(PROFILE)[wd])
            dec = decompose(s)
            assert np.abs(dec.season - PROFILE).max() <= 1e-6
            assert np.abs(dec.resid[3:-3] - 1.0).max() <= 1e-6
        s = DailySeries(MONDAY, 100.0 + t)
        dec = decompose(s)
        assert np.abs(dec.season - 1.0).max() <= 1e-6
        assert np.abs(dec.resid[3:-3] - 1.0).max() <= 1e-6


@acceptance("AC6  in-season scenario: mild shifts suppressed at k=0.4, spike and strong kept, golden, < 1 s")
def test_ac6_scenario():
    with Budget(1.0):
        cfg = scenario_config()
        assert (cfg.length, cfg.noise_sigma) == (112, 0.04)
        kinds = {a.index: a for a in cfg.anomalies}
        assert kinds[SCENARIO_SPIKE].kind is AnomalyKind.SPIKE and kinds[SCENARIO_SPIKE].magnitude == 1.8
        clean = simulate(dataclasses.replace(cfg, noise_sigma=0.0)).series
        for i in (*SCENARIO_MILD, SCENARIO_STRONG):
            assert kinds[i].kind is AnomalyKind.IN_SEASON_SHIFT
            assert weekly_range_check(clean, i)
        # the strong point takes its week's maximum weekday value
        assert kinds[SCENARIO_STRONG].target_weekday == int(np.argmax(cfg.season_profile))
        assert not weekly_range_check(clean, SCENARIO_SPIKE)

        flags = scenario_flags()
        classical, adjusted = set(flags["z2.0_k0.0"]), set(flags["z2.0_k0.4"])
        assert {*SCENARIO_MILD, SCENARIO_SPIKE, SCENARIO_STRONG} <= classical
        assert {SCENARIO_SPIKE, SCENARIO_STRONG} <= adjusted
        assert not adjusted & set(SCENARIO_MILD)
        assert flags == json.loads((GOLDEN / "scenario_flags.json").read_text())


@acceptance("AC7  selected cell F1 >= F1 at (z=2, k=0) on scenario labels, < 2 s")
def test_ac7_sweep_selection():
    with Budget(2.0):
        ls = simulate(scenario_config())
        grid = GridSpec((1.5, 2.0, 2.5, 3.0), K_GRID)
        report = sweep(ls, decompose(ls.series), grid)
        chosen = select(report)
        assert chosen == report.selected
        best = report.cell(*chosen)
        assert best.f1 >= report.cell(2.0, 0.0).f1
        top = max(c.f1 for c in report.cells)
        ties = [c for c in report.cells if c.f1 == top]
        assert (best.k, best.z) == max((c.k, c.z) for c in ties)


@acceptance("AC8  is_anomaly <=> value outside decision bounds, 5x6 grid x 50 series, exact, < 5 s")
def test_ac8_bound_flag_consistency():
    zs = (1.0, 1.5, 2.0, 2.5, 3.0)
    with Budget(5.0):
        for seed in range(50):
            ls = random_labeled(40_000 + seed)
            dec = decompose(ls.series)
            v = ls.series.values
            for z in zs:
                for k in K_GRID:
                    cfg = DetectorConfig(z, k)
                    lower, upper = decision_bounds(dec, cfg)
                    outside = (v <= lower) | (v >= upper)
                    assert np.array_equal(outside, k_detect(ls.series, dec, cfg).is_anomaly), (seed, z, k)


@acceptance("AC9  3650-point detect < 50 ms; 100-cell sweep < 2 s")
def test_ac9_performance():
    ls = random_labeled(7, length=3650)
    runs = []
    for _ in range(5):
        start = time.perf_counter()
        dec = decompose(ls.series)
        k_detect(ls.series, dec, DetectorConfig(2.0, 0.4))
        runs.append(time.perf_counter() - start)
    assert statistics.median(runs) < 0.050, runs

    grid = GridSpec(tuple(np.linspace(1.0, 3.25, 10)), tuple(np.linspace(0.0, 1.0, 10)))
    assert len(grid) == 100
    with Budget(2.0):
        report = sweep(ls, decompose(ls.series), grid)
    assert len(report.cells) == 100


@acceptance("AC10 CLI detect/sweep outputs byte-identical to goldens; ResultCsv recomputable to 1e-9")
def test_ac10_cli_goldens(tmp_path):
    series = tmp_path / "sample_series.csv"
    labels = tmp_path / "sample_labels.csv"
    shutil.copy(data_path("sample_series.csv"), series)
    shutil.copy(data_path("sample_labels.csv"), labels)

    for z, k in ((2.0, 0.0), (2.0, 0.4)):
        out = tmp_path / f"detect_z{z}_k{k}.csv"
        assert main(["detect", str(series), str(out), "--z", str(z), "--k", str(k)]) == 0
        assert out.read_bytes() == (GOLDEN / out.name).read_bytes()
        meta = formats.sidecar_path(out)
        assert meta.read_bytes() == (GOLDEN / meta.name).read_bytes()

        thresh = json.loads(meta.read_text())["thresh"]
        band = 1 + thresh
        for row in csv.DictReader(io.StringIO(out.read_text())):
            value, hi, lo = float(row["value"]), float(row["vp_high"]), float(row["vp_low"])
            p_high = value / hi / band
            p_low = 1 / (value / lo * band)
            assert abs(p_high - float(row["p_high"])) <= 1e-9
            assert abs(p_low - float(row["p_low"])) <= 1e-9
            assert abs(max(p_high, p_low) - float(row["p"])) <= 1e-9
            assert row["is_anomaly"] == ("1" if float(row["p"]) > 1 else "0")

    report = tmp_path / "sweep_report.json"
    args = ["sweep", str(series), str(labels), str(report), "--z-list", SWEEP_Z, "--k-list", SWEEP_K]
    assert main(args) == 0
    assert report.read_bytes() == (GOLDEN / "sweep_report.json").read_bytes()
