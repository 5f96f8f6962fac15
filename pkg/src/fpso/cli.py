"""Command line front-end: ``fpso run|calibrate|sweep|verify|summarize|plotdata``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import calibration, experiments, phases, stopping, swarm
from .benchmarks import NAMES

DEFAULT_BUDGET = 15_000_000


def sigma_stag_arg(text: str) -> int:
    """A number, or a path to a calibration JSON written by ``fpso calibrate``."""
    try:
        return int(round(float(text)))
    except ValueError:
        pass
    if not Path(text).is_file():
        raise argparse.ArgumentTypeError(f"{text!r} is neither a number nor a calibration file")
    return calibration.load_sigma_stag(text)


def _swarm_flags(p, particles=5, dimensions=15, seed=0):
    p.add_argument("--objective", default="sphere", choices=sorted(NAMES))
    p.add_argument("--particles", type=int, default=particles)
    p.add_argument("--dimensions", type=int, default=dimensions)
    p.add_argument("--delta", type=float, default=swarm.DELTA)
    p.add_argument("--seed", type=int, default=seed)


def _calibration_config(a) -> calibration.CalibrationConfig:
    return calibration.CalibrationConfig(
        num_particles=a.particles, num_dimensions=a.dimensions, mu=a.mu, delta=a.delta,
        trials=a.trials, intervals_per_trial=a.intervals, warmup_intervals=a.warmup,
        seed=a.seed, objective=a.objective)


def _calibration_flags(p):
    _swarm_flags(p)
    p.add_argument("--mu", type=int, default=50_000)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--intervals", type=int, default=10)
    p.add_argument("--warmup", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fpso")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="replicated optimization runs")
    _swarm_flags(p)
    p.add_argument("--mode", default="forced", choices=[m.value for m in swarm.Mode])
    p.add_argument("--mu", type=int, default=50_000)
    p.add_argument("--gamma", type=int, default=1350)
    p.add_argument("--sigma-stag", type=sigma_stag_arg,
                   help="stagnation frequency, or a calibration JSON file")
    p.add_argument("--kappa", type=int, action="append",
                   help="partial stop; repeat to record further kappas as observers")
    p.add_argument("--observe-full", action="store_true",
                   help="record when the full stop would have fired")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--log-every", type=int, default=50_000)
    p.add_argument("--init-half-width", type=float,
                   help="symmetric init box [-w, w] instead of the benchmark default")
    p.add_argument("--cumulative", action="store_true", help="cumulative telemetry windows")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("calibrate", help="measure sigma_stag at a planted optimum")
    _calibration_flags(p)
    p.add_argument("--out", type=Path, help="directory for calibration.json and samples.csv")

    p = sub.add_parser("sweep", help="calibration along one axis")
    _calibration_flags(p)
    p.add_argument("--axis", required=True, choices=[a.value for a in calibration.Axis])
    p.add_argument("--values", required=True, type=float, nargs="+")
    p.add_argument("--out", type=Path, help="JSON table")

    p = sub.add_parser("verify", help="statistical checks of the pulsation phases")
    _swarm_flags(p, seed=2024)
    p.add_argument("--iterations", type=int, default=200_000)
    p.add_argument("--warmup-iterations", type=int, default=1_000)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--chi", type=float, nargs="+", default=[swarm.CHI])
    p.add_argument("--out", type=Path)

    p = sub.add_parser("summarize", help="summary statistics of a run directory")
    p.add_argument("run_dir", type=Path)

    p = sub.add_parser("plotdata", help="emit whitespace-separated data for a figure")
    p.add_argument("kind", choices=[k.value for k in experiments.PlotKind])
    p.add_argument("--from", dest="source", type=Path, help="run directory (ForcingVsIteration)")
    p.add_argument("--values", type=float, nargs="+", help="sweep values (Frequency* kinds)")
    p.add_argument("--iterations", type=int, default=1_000_000, help="DistanceHistogram length")
    _calibration_flags(p)
    p.add_argument("--out", type=Path, required=True)
    return parser


def cmd_run(a) -> int:
    init = {}
    if a.init_half_width is not None:
        init = dict(init_low=-a.init_half_width, init_high=a.init_half_width)
    cfg = swarm.SwarmConfig(a.particles, a.dimensions, delta=a.delta, rng_seed=a.seed,
                            mode=a.mode, **init)
    rule, observers = None, []
    if a.kappa or a.observe_full:
        if a.sigma_stag is None:
            raise SystemExit("--kappa and --observe-full need --sigma-stag")
        partials = [stopping.PartialStop(a.sigma_stag, a.gamma, a.mu, k, a.dimensions)
                    for k in a.kappa or []]
        full = [stopping.FullStop(a.sigma_stag, a.gamma, a.mu)] if a.observe_full else []
        rule, *observers = partials + full
    elif a.sigma_stag is not None:
        rule = stopping.FullStop(a.sigma_stag, a.gamma, a.mu)
    exp = experiments.ExperimentConfig(
        a.objective, cfg, rule=rule, budget=a.budget, observers=tuple(observers),
        replicates=a.replicates, log_every=a.log_every, window=a.mu,
        window_mode="cumulative" if a.cumulative else "sliding")
    records = experiments.run_experiment(exp, a.out)
    print(json.dumps(experiments.summarize(records), indent=2, sort_keys=True))
    return 0


def cmd_calibrate(a) -> int:
    res = calibration.calibrate(_calibration_config(a))
    if a.out is not None:
        a.out.mkdir(parents=True, exist_ok=True)
        res.write(a.out / "samples.csv", a.out / "calibration.json")
    print(f"sigma_stag = {res.sigma_stag}  (mean {res.sigma_stag_mean:.1f}, "
          f"std {res.sigma_stag_std:.1f}, se {res.standard_error:.1f})")
    print(f"suggested gamma ~ 3 * std = {3 * res.sigma_stag_std:.0f}")
    return 0


def _sweep_values(axis, values):
    axis = calibration.Axis(axis)
    return [v if axis is calibration.Axis.DELTA else int(v) for v in values]


def cmd_sweep(a) -> int:
    sweep = calibration.scaling_sweep(a.axis, _sweep_values(a.axis, a.values), _calibration_config(a))
    table = calibration.sweep_table(a.axis, sweep)
    text = json.dumps(table, indent=2)
    if a.out is not None:
        a.out.write_text(text + "\n")
    print(text)
    return 0


def cmd_verify(a) -> int:
    cfg = phases.HarnessConfig(num_particles=a.particles, num_dimensions=a.dimensions,
                               iterations=a.iterations, warmup=a.warmup_iterations,
                               delta=a.delta, seed=a.seed, objective=a.objective)
    try:
        reports = phases.run_suite(cfg, a.samples, tuple(a.chi))
    except phases.InsufficientSamples as exc:
        print(json.dumps({"passed": False, "error": str(exc)}))
        return 2
    body = json.loads(phases.suite_to_json(reports))
    body["passed"] = phases.suite_passed(reports)
    text = json.dumps(body, indent=2)
    if a.out is not None:
        a.out.write_text(text + "\n")
    print(text)
    return 0 if body["passed"] else 1


def cmd_summarize(a) -> int:
    records = experiments.load_records(a.run_dir)
    print(json.dumps(experiments.summarize(records), indent=2, sort_keys=True))
    return 0


def cmd_plotdata(a) -> int:
    kind = experiments.PlotKind(a.kind)
    if kind is experiments.PlotKind.FORCING_VS_ITERATION:
        if a.source is None:
            raise SystemExit("ForcingVsIteration needs --from <run dir>")
        data = experiments.load_records(a.source)
    elif kind is experiments.PlotKind.DISTANCE_HISTOGRAM:
        data = calibration.distance_histogram(_calibration_config(a), a.iterations)
    else:
        if not a.values:
            raise SystemExit(f"{kind.value} needs --values")
        axis = {experiments.PlotKind.FREQUENCY_VS_D: calibration.Axis.DIMENSIONS,
                experiments.PlotKind.FREQUENCY_VS_N: calibration.Axis.PARTICLES,
                experiments.PlotKind.FREQUENCY_VS_INTERVAL: calibration.Axis.INTERVAL_LENGTH}[kind]
        data = calibration.scaling_sweep(axis, _sweep_values(axis, a.values), _calibration_config(a))
    print(experiments.emit_plot_data(data, kind, a.out))
    return 0


COMMANDS = {
    "run": cmd_run, "calibrate": cmd_calibrate, "sweep": cmd_sweep, "verify": cmd_verify,
    "summarize": cmd_summarize, "plotdata": cmd_plotdata,
}


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return COMMANDS[a.command](a)


if __name__ == "__main__":
    sys.exit(main())
