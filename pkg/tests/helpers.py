"""Shared fixtures-as-functions for the test suite."""
import datetime as dt
import json
from importlib import resources
from pathlib import Path

import numpy as np

from inseason.formats import sim_config_from_dict
from inseason.simulator import AnomalySpec, SimConfig, simulate

PROFILE = (1.25, 1.15, 1.0, 0.9, 0.8, 0.9, 1.0)
MONDAY = dt.date(2022, 6, 6)
GOLDEN = Path(__file__).parent / "golden"
SCENARIO_SPIKE = 45
SCENARIO_STRONG = 60
SCENARIO_MILD = (22, 77)


def data_path(name):
    return resources.files("inseason") / "data" / name


def scenario_config() -> SimConfig:
    return sim_config_from_dict(json.loads(data_path("scenario.json").read_text()))


def noise_free_config(length=28, anomalies=(), sigma=0.0, seed=42, slope=0.0) -> SimConfig:
    return SimConfig(length, MONDAY, 100.0, slope, PROFILE, sigma, tuple(anomalies), seed)


def random_config(seed: int, length=None) -> SimConfig:
    """Varied slope, sigma in {0.02, 0.05, 0.1}, random profile and a few anomalies."""
    rng = np.random.default_rng(seed)
    length = length or int(rng.integers(28, 141))
    start = MONDAY + dt.timedelta(days=int(rng.integers(0, 7)))
    raw = rng.uniform(0.6, 1.4, 7)
    profile = tuple((raw / raw.mean()).tolist())
    # fsum-exact mean is not guaranteed after division; renormalise once more
    profile = tuple(float(p) for p in np.asarray(profile) / (sum(profile) / 7))
    sigma = float(rng.choice([0.02, 0.05, 0.1]))
    base = float(rng.uniform(20, 500))
    slope = float(rng.uniform(-0.4, 0.4)) * base / length
    anomalies = []
    used = set()
    for _ in range(int(rng.integers(0, 5))):
        i = int(rng.integers(0, length))
        if i in used:
            continue
        wd = (start.weekday() + i) % 7
        kind = rng.choice(["spike", "dip", "in_season_shift"])
        if kind == "in_season_shift":
            target = int(rng.integers(0, 7))
            if target == wd or not 0 <= i - wd + target < length:
                continue
            anomalies.append(AnomalySpec(i, kind, target))
        else:
            anomalies.append(AnomalySpec(i, kind, float(rng.uniform(1.3, 2.5))))
        used.add(i)
    return SimConfig(length, start, base, slope, profile, sigma, tuple(anomalies), seed)


def random_labeled(seed: int, length=None):
    return simulate(random_config(seed, length))
