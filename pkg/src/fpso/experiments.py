"""Experiment orchestration, run records, statistics and plot data.

A run stops at the first of its ``rule`` and ``budget``. ``observers`` are
further rules that are evaluated on the same windows and recorded when they
first fire, without stopping the run; since stopping never changes the
trajectory, an observer's report equals what a separate run stopped by that
rule would have produced.

Output directory layout (``write_outputs``):

    config.json     the ExperimentConfig
    runs.jsonl      one RunRecord per line
    series.csv      run_id, iteration, f_best, grad_norm, sigma_window
    telemetry.csv   run_id, window_index, window_mode, sigma_total, sigma_d_1..D
    summary.json    SummaryStats per rule
"""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

from . import stopping, swarm
from ._parallel import pmap
from .benchmarks import get_objective
from .stopping import MaxIterations, TerminationReport
from .telemetry import IntervalStats, WindowMode, write_stats_csv


@dataclass(frozen=True)
class ExperimentConfig:
    objective: str
    swarm: swarm.SwarmConfig
    rule: stopping.StoppingRule | None = None
    budget: int | None = None
    observers: tuple = ()
    replicates: int = 100
    log_every: int = 50_000
    window: int | None = None  # telemetry window when no frequency rule sets one
    window_mode: WindowMode = WindowMode.SLIDING

    def __post_init__(self):
        object.__setattr__(self, "observers", tuple(self.observers))
        object.__setattr__(self, "window_mode", WindowMode(self.window_mode))
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.log_every < 1:
            raise ValueError("log_every must be >= 1")
        if self.rule is None and self.budget is None:
            raise ValueError("a run needs a stopping rule or a budget")
        mus = {r.mu for r in self.frequency_rules}
        if len(mus) > 1:
            raise ValueError("all frequency rules of one experiment must share mu")
        get_objective(self.objective, self.swarm.num_dimensions)

    @property
    def frequency_rules(self) -> list:
        rules = [self.rule, *self.observers]
        return [r for r in rules if r is not None and not isinstance(r, MaxIterations)]

    @property
    def mu(self) -> int:
        fr = self.frequency_rules
        if fr:
            return fr[0].mu
        return self.window or self.log_every

    @property
    def iteration_cap(self) -> int | None:
        caps = [self.budget] if self.budget is not None else []
        if isinstance(self.rule, MaxIterations):
            caps.append(self.rule.limit)
        return min(caps) if caps else None

    def to_dict(self) -> dict:
        sw = asdict(self.swarm)
        sw["mode"] = self.swarm.mode.value
        return {
            "objective": self.objective,
            "swarm": sw,
            "rule": None if self.rule is None else stopping.rule_to_dict(self.rule),
            "budget": self.budget,
            "observers": [stopping.rule_to_dict(r) for r in self.observers],
            "replicates": self.replicates,
            "log_every": self.log_every,
            "window": self.window,
            "window_mode": self.window_mode.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        sw = dict(d["swarm"])
        for key in ("init_low", "init_high"):
            if sw.get(key) is not None:
                sw[key] = tuple(sw[key])
        return cls(
            objective=d["objective"],
            swarm=swarm.SwarmConfig(**sw),
            rule=None if d.get("rule") is None else stopping.rule_from_dict(d["rule"]),
            budget=d.get("budget"),
            observers=tuple(stopping.rule_from_dict(r) for r in d.get("observers", [])),
            replicates=d.get("replicates", 100),
            log_every=d.get("log_every", 50_000),
            window=d.get("window"),
            window_mode=d.get("window_mode", "sliding"),
        )


@dataclass
class RunRecord:
    config: dict
    replicate: int
    seed: int
    termination: TerminationReport
    observations: dict  # rule label -> TerminationReport | None
    series: list  # (iteration, f_best, grad_norm, sigma_window or None)
    windows: np.ndarray  # (W, D) forced counts per disjoint window
    best_position: list
    wall_time: float = 0.0

    @property
    def iter_term(self) -> int:
        return self.termination.iteration

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "replicate": self.replicate,
            "seed": self.seed,
            "termination": self.termination.to_dict(),
            "observations": {k: None if v is None else v.to_dict()
                             for k, v in self.observations.items()},
            "series": [list(r) for r in self.series],
            "windows": self.windows.tolist(),
            "best_position": list(self.best_position),
            "wall_time": self.wall_time,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        D = d["config"]["swarm"]["num_dimensions"]
        return cls(
            config=d["config"],
            replicate=d["replicate"],
            seed=d["seed"],
            termination=TerminationReport.from_dict(d["termination"]),
            observations={k: None if v is None else TerminationReport.from_dict(v)
                          for k, v in d["observations"].items()},
            series=[tuple(r) for r in d["series"]],
            windows=np.array(d["windows"], dtype=np.int64).reshape(-1, D),
            best_position=list(d["best_position"]),
            wall_time=d.get("wall_time", 0.0),
        )

    def to_json(self, timing: bool = True) -> str:
        """JSON line; ``timing=False`` drops wall_time, leaving a seed-reproducible string."""
        d = self.to_dict()
        if not timing:
            del d["wall_time"]
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "RunRecord":
        return cls.from_dict(json.loads(s))

    def __eq__(self, other) -> bool:
        return isinstance(other, RunRecord) and self.to_dict() == other.to_dict()

    def window_stats(self, mode: WindowMode = WindowMode.SLIDING) -> list[IntervalStats]:
        mu = self.config_obj().mu
        counts = np.cumsum(self.windows, axis=0) if mode is WindowMode.CUMULATIVE else self.windows
        return [IntervalStats(0 if mode is WindowMode.CUMULATIVE else k * mu, (k + 1) * mu,
                              c, k, mode) for k, c in enumerate(counts)]

    def config_obj(self) -> ExperimentConfig:
        return ExperimentConfig.from_dict(self.config)


def run_single(config: ExperimentConfig, replicate: int = 0) -> RunRecord:
    t0 = time.perf_counter()
    obj = get_objective(config.objective, config.swarm.num_dimensions)
    scfg = replace(config.swarm, rng_stream=replicate)
    state = swarm.initialize(scfg, obj)
    D = state.num_dimensions
    mu = config.mu
    cap = config.iteration_cap
    labels = [stopping.rule_label(r) for r in config.observers]
    observed: dict = {lab: None for lab in labels}
    windows = []
    series = []
    counts = np.zeros(D, dtype=np.int64)
    termination = None

    def annotate(report):
        return replace(report, best_value=state.global_value,
                       gradient_norm=obj.gradient_norm(state.G))

    while termination is None:
        i = state.iteration
        nxt = min((i // mu + 1) * mu, (i // config.log_every + 1) * config.log_every)
        if cap is not None:
            nxt = min(nxt, cap)
        swarm.advance(state, obj, nxt - i, counts=counts)
        i = state.iteration
        stats = None
        if i % mu == 0:
            k = len(windows)
            stats = IntervalStats(k * mu, i, counts.copy(), k)
            windows.append(stats.per_dim_forced)
            counts[:] = 0
        sigma = None if stats is None else stats.total_forced
        series.append((i, state.global_value, obj.gradient_norm(state.G), sigma))
        for lab, rule in zip(labels, config.observers):
            if observed[lab] is None:
                rep = stopping.evaluate(rule, stats, i)
                if rep is not None:
                    observed[lab] = annotate(rep)
        for rule in (config.rule, None if config.budget is None else MaxIterations(config.budget)):
            if rule is None:
                continue
            rep = stopping.evaluate(rule, stats, i)
            if rep is not None:
                termination = annotate(rep)
                break
    return RunRecord(
        config=config.to_dict(),
        replicate=replicate,
        seed=scfg.rng_seed,
        termination=termination,
        observations=observed,
        series=series,
        windows=np.array(windows, dtype=np.int64).reshape(-1, D),
        best_position=state.G.tolist(),
        wall_time=time.perf_counter() - t0,
    )


def run_experiment(config: ExperimentConfig, out_dir=None) -> list[RunRecord]:
    records = pmap(lambda k: run_single(config, k), range(config.replicates))
    if out_dir is not None:
        write_outputs(records, out_dir)
    return records


# ---------------------------------------------------------------- statistics


@dataclass(frozen=True)
class SummaryStats:
    count: int
    median: float
    std_deviation: float
    geometric_mean: float | None
    excluded_from_geometric_mean: int

    def to_dict(self) -> dict:
        return asdict(self)


def summarize_values(values) -> SummaryStats:
    v = np.asarray(list(values), dtype=float)
    if v.size == 0:
        raise ValueError("nothing to summarize")
    median = float(np.sort(v)[(v.size - 1) // 2])  # lower middle for even counts
    std = float(v.std(ddof=1)) if v.size > 1 else 0.0
    pos = v[v > 0]
    geo = float(np.exp(np.mean(np.log(pos)))) if pos.size else None
    return SummaryStats(int(v.size), median, std, geo, int(v.size - pos.size))


def summarize(records: list[RunRecord]) -> dict:
    """SummaryStats of iter_term and terminal gradient norm, per rule."""
    if not records:
        raise ValueError("no records")
    out = {}
    groups = {"termination": [r.termination for r in records]}
    for lab in records[0].observations:
        groups[lab] = [r.observations[lab] for r in records]
    for name, reps in groups.items():
        fired = [r for r in reps if r is not None]
        entry = {"fired": len(fired), "runs": len(reps)}
        if fired:
            entry["iter_term"] = summarize_values(r.iteration for r in fired).to_dict()
            entry["gradient_norm"] = summarize_values(r.gradient_norm for r in fired).to_dict()
            entry["best_value"] = summarize_values(r.best_value for r in fired).to_dict()
        out[name] = entry
    return out


# ---------------------------------------------------------------- persistence

SERIES_HEADER = ["run_id", "iteration", "f_best", "grad_norm", "sigma_window"]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_outputs(records: list[RunRecord], out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = sorted(records, key=lambda r: r.replicate)
    with open(out / "config.json", "w") as fh:
        json.dump(records[0].config, fh, indent=2, sort_keys=True)
    with open(out / "runs.jsonl", "w") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")
    with open(out / "series.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_HEADER)
        for r in records:
            for row in r.series:
                w.writerow([r.replicate, *(_fmt(x) for x in row)])
    mode = WindowMode(records[0].config.get("window_mode", "sliding"))
    rows = [(r.replicate, s) for r in records for s in r.window_stats(mode)]
    if rows:
        write_stats_csv(out / "telemetry.csv", rows)
    with open(out / "summary.json", "w") as fh:
        json.dump(summarize(records), fh, indent=2, sort_keys=True)
    return out


def load_records(out_dir) -> list[RunRecord]:
    with open(Path(out_dir) / "runs.jsonl") as fh:
        return [RunRecord.from_json(line) for line in fh if line.strip()]


# ---------------------------------------------------------------- plot data


class PlotKind(str, Enum):
    FORCING_VS_ITERATION = "ForcingVsIteration"
    FREQUENCY_VS_D = "FrequencyVsD"
    FREQUENCY_VS_N = "FrequencyVsN"
    FREQUENCY_VS_INTERVAL = "FrequencyVsInterval"
    DISTANCE_HISTOGRAM = "DistanceHistogram"


def _write_columns(path, header: list[str], comments: list[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        fh.write("# " + " ".join(header) + "\n")
        for row in rows:
            fh.write(" ".join(_fmt(x) if not isinstance(x, (float, np.floating)) else repr(float(x))
                              for x in row) + "\n")
    return Path(path)


def emit_plot_data(data, kind: PlotKind | str, path) -> Path:
    """Write one whitespace-separated data file for a figure.

    ``data`` is a list of RunRecords for ForcingVsIteration (the first record
    is plotted), a calibration sweep (list of (value, CalibrationResult)) for
    the Frequency* kinds, or a DistanceHistogram.
    """
    kind = PlotKind(kind)
    if data is None or (isinstance(data, list) and not data):
        raise ValueError("no data to plot")
    if kind is PlotKind.FORCING_VS_ITERATION:
        rec = data[0]
        if rec.windows.size == 0:
            raise ValueError("record has no window telemetry")
        D = rec.windows.shape[1]
        cum = np.cumsum(rec.windows, axis=0)
        f_at = {row[0]: row[1] for row in rec.series}
        mu = rec.config_obj().mu
        rows = [(k + 1, *cum[k].tolist(), f_at.get((k + 1) * mu, math.nan)) for k in range(len(cum))]
        header = ["interval"] + [f"sigma_d_{d + 1}" for d in range(D)] + ["f_best"]
        return _write_columns(path, header, [f"cumulative forcing per dimension, |I_i| = {mu}*i",
                                             f"objective {rec.config['objective']}"], rows)
    if kind is PlotKind.DISTANCE_HISTOGRAM:
        centers = 0.5 * (data.edges[1:] + data.edges[:-1])
        rows = zip(centers, data.counts)
        return _write_columns(path, ["distance_over_delta", "count"],
                              ["signed distance G - X of one particle in one dimension"], rows)
    from .calibration import Axis, sweep_table

    axis = {PlotKind.FREQUENCY_VS_D: Axis.DIMENSIONS, PlotKind.FREQUENCY_VS_N: Axis.PARTICLES,
            PlotKind.FREQUENCY_VS_INTERVAL: Axis.INTERVAL_LENGTH}[kind]
    table = sweep_table(axis, data)
    label = {Axis.DIMENSIONS: "D", Axis.PARTICLES: "N", Axis.INTERVAL_LENGTH: "interval_length"}[axis]
    rows = [(r["value"], r["normalized_mean"], r["normalized_std"]) for r in table]
    norm = {Axis.DIMENSIONS: "sigma/D", Axis.PARTICLES: "sigma/N", Axis.INTERVAL_LENGTH: "sigma/|I|"}[axis]
    return _write_columns(path, [label, f"mean_{norm}", "std"],
                          ["calibration at a planted optimum"], rows)
