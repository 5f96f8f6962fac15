"""Measurement of the stagnation frequency sigma_stag(N, D, mu).

Every trial plants positions, local attractors and the global attractor at
the optimum of a benchmark (velocities zero), lets the swarm pulsate, and
counts forced updates in consecutive windows of mu iterations.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field, replace
from enum import Enum

import numpy as np

from . import swarm
from ._parallel import pmap
from .benchmarks import get_objective
from .telemetry import IntervalStats, write_stats_csv

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CalibrationConfig:
    num_particles: int = 5
    num_dimensions: int = 15
    mu: int = 50_000
    delta: float = swarm.DELTA
    trials: int = 100
    intervals_per_trial: int = 10
    warmup_intervals: int = 1
    chi: float = swarm.CHI
    c1: float = swarm.C1
    c2: float = swarm.C2
    seed: int = 0
    objective: str = "sphere"

    def __post_init__(self):
        if self.trials < 1 or self.intervals_per_trial < 1:
            raise ValueError("trials and intervals_per_trial must be >= 1")
        if self.warmup_intervals < 0 or self.mu < 1:
            raise ValueError("bad warmup_intervals or mu")

    def swarm_config(self, trial: int) -> swarm.SwarmConfig:
        return swarm.SwarmConfig(self.num_particles, self.num_dimensions, self.chi, self.c1,
                                 self.c2, self.delta, rng_seed=self.seed, rng_stream=trial)


@dataclass
class CalibrationResult:
    config: CalibrationConfig
    samples: np.ndarray = field(repr=False)  # (trials, intervals, D) forced counts
    attractor_updates: int = 0  # during sampled windows
    warmup_attractor_updates: int = 0

    @property
    def per_trial(self) -> np.ndarray:
        return self.samples.sum(axis=2).mean(axis=1)

    @property
    def sigma_stag_mean(self) -> float:
        return float(self.per_trial.mean())

    @property
    def sigma_stag_std(self) -> float:
        t = self.per_trial
        return float(t.std(ddof=1)) if len(t) > 1 else 0.0

    @property
    def standard_error(self) -> float:
        return self.sigma_stag_std / np.sqrt(len(self.per_trial))

    @property
    def sigma_stag(self) -> int:
        return int(round(self.sigma_stag_mean))

    @property
    def per_dim_mean(self) -> np.ndarray:
        return self.samples.mean(axis=(0, 1))

    @property
    def relative_mean(self) -> float:
        return self.sigma_stag_mean / self.config.mu

    @property
    def window_cv(self) -> float:
        """Mean over trials of the coefficient of variation of sigma(I) across windows."""
        w = self.samples.sum(axis=2).astype(float)
        if w.shape[1] < 2:
            return 0.0
        return float(np.mean(w.std(axis=1, ddof=1) / w.mean(axis=1)))

    def summary(self) -> dict:
        return {
            **asdict(self.config),
            "sigma_stag": self.sigma_stag,
            "sigma_stag_mean": self.sigma_stag_mean,
            "sigma_stag_std": self.sigma_stag_std,
            "standard_error": self.standard_error,
            "relative_mean": self.relative_mean,
            "per_dim_mean": self.per_dim_mean.tolist(),
            "attractor_updates": self.attractor_updates,
            "warmup_attractor_updates": self.warmup_attractor_updates,
        }

    def write(self, csv_path=None, json_path=None) -> None:
        if csv_path is not None:
            rows = []
            mu = self.config.mu
            for t, trial in enumerate(self.samples):
                for k, counts in enumerate(trial):
                    rows.append((t, IntervalStats(k * mu, (k + 1) * mu, counts, k)))
            write_stats_csv(csv_path, rows)
        if json_path is not None:
            with open(json_path, "w") as fh:
                json.dump(self.summary(), fh, indent=2)


def _run_trial(config: CalibrationConfig, trial: int):
    obj = get_objective(config.objective, config.num_dimensions)
    state = swarm.plant(config.swarm_config(trial), obj, obj.known_optimum)
    if config.warmup_intervals:
        swarm.advance(state, obj, config.warmup_intervals * config.mu)
    # a particle whose dimensions all stay unforced in iteration 0 remains exactly
    # at the optimum and re-sets its (identical) attractors; those ties are harmless
    warmup_updates = state.local_updates + state.global_updates
    out = np.zeros((config.intervals_per_trial, config.num_dimensions), dtype=np.int64)
    for k in range(config.intervals_per_trial):
        swarm.advance(state, obj, config.mu, counts=out[k])
    return out, state.local_updates + state.global_updates - warmup_updates, warmup_updates


def calibrate(config: CalibrationConfig) -> CalibrationResult:
    results = pmap(lambda t: _run_trial(config, t), range(config.trials))
    samples = np.stack([r[0] for r in results])
    updates = sum(r[1] for r in results)
    warm = sum(r[2] for r in results)
    if warm:
        log.info("%d attractor ties at the planted optimum during warmup", warm)
    if updates:
        log.warning("calibration saw %d attractor updates in sampled windows", updates)
    return CalibrationResult(config, samples, updates, warm)


def load_sigma_stag(path) -> int:
    with open(path) as fh:
        return int(json.load(fh)["sigma_stag"])


class Axis(str, Enum):
    DIMENSIONS = "dimensions"
    PARTICLES = "particles"
    INTERVAL_LENGTH = "interval_length"
    DELTA = "delta"


_AXIS_FIELD = {
    Axis.DIMENSIONS: "num_dimensions",
    Axis.PARTICLES: "num_particles",
    Axis.INTERVAL_LENGTH: "mu",
    Axis.DELTA: "delta",
}


def scaling_sweep(axis: Axis | str, values, base: CalibrationConfig) -> list[tuple[object, CalibrationResult]]:
    values = list(values)
    if not values:
        raise ValueError("values must be non-empty")
    name = _AXIS_FIELD[Axis(axis)]
    return [(v, calibrate(replace(base, **{name: v}))) for v in values]


def sweep_table(axis: Axis | str, sweep) -> list[dict]:
    """Plot-ready rows: value, mean, std, and sigma normalised by D, N or |I|."""
    axis = Axis(axis)
    rows = []
    for value, res in sweep:
        cfg = res.config
        norm = {Axis.DIMENSIONS: cfg.num_dimensions, Axis.PARTICLES: cfg.num_particles,
                Axis.INTERVAL_LENGTH: cfg.mu, Axis.DELTA: 1}[axis]
        rows.append({
            "value": value,
            "sigma_mean": res.sigma_stag_mean,
            "sigma_std": res.sigma_stag_std,
            "standard_error": res.standard_error,
            "normalized_mean": res.sigma_stag_mean / norm,
            "normalized_std": res.sigma_stag_std / norm,
        })
    return rows


@dataclass
class DistanceHistogram:
    counts: np.ndarray
    edges: np.ndarray
    samples: np.ndarray = field(repr=False)  # signed G - X, in units of delta

    @property
    def mean(self) -> float:
        return float(self.samples.mean())

    @property
    def standard_error(self) -> float:
        return float(self.samples.std(ddof=1) / np.sqrt(len(self.samples)))

    def mass_within(self, c: float) -> float:
        return float(np.mean(np.abs(self.samples) <= c))

    def support_scale(self, mass: float = 0.999) -> float:
        return float(np.quantile(np.abs(self.samples), mass))


def distance_histogram(config: CalibrationConfig, iterations: int = 1_000_000, bins=None,
                       trial: int = 0) -> DistanceHistogram:
    """Per-iteration signed distance G - X of particle 0 in dimension 0, in units of delta."""
    obj = get_objective(config.objective, config.num_dimensions)
    state = swarm.plant(config.swarm_config(trial), obj, obj.known_optimum)
    swarm.advance(state, obj, config.warmup_intervals * config.mu)
    dist = np.empty(iterations)
    swarm.advance(state, obj, iterations, dist_trace=dist)
    dist /= config.delta
    if bins is None:
        bins = np.linspace(-4.0, 4.0, 81)
    counts, edges = np.histogram(dist, bins=bins)
    return DistanceHistogram(counts, edges, dist)
