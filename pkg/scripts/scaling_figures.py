"""Plot data for the stagnation-frequency scaling figures.

Writes whitespace-separated columns for sigma_stag against D, against N and
against the interval length, plus the histogram of G - X in units of delta.

    python3 scripts/scaling_figures.py --out results/figures --trials 20
"""
import argparse
from pathlib import Path

from fpso.calibration import Axis, CalibrationConfig, distance_histogram, scaling_sweep
from fpso.experiments import PlotKind, emit_plot_data


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--intervals", type=int, default=10)
    p.add_argument("--histogram-iterations", type=int, default=1_000_000)
    p.add_argument("--out", type=Path, default=Path("results/figures"))
    a = p.parse_args()

    base = CalibrationConfig(trials=a.trials, intervals_per_trial=a.intervals)
    jobs = [
        (PlotKind.FREQUENCY_VS_D, Axis.DIMENSIONS, [5, 10, 15, 20, 25, 30]),
        (PlotKind.FREQUENCY_VS_N, Axis.PARTICLES, list(range(2, 15))),
        (PlotKind.FREQUENCY_VS_INTERVAL, Axis.INTERVAL_LENGTH, [500, 5000, 50_000]),
    ]
    a.out.mkdir(parents=True, exist_ok=True)
    for kind, axis, values in jobs:
        path = emit_plot_data(scaling_sweep(axis, values, base), kind, a.out / f"{kind.value}.dat")
        print(path)
    hist = distance_histogram(base, a.histogram_iterations)
    print(emit_plot_data(hist, PlotKind.DISTANCE_HISTOGRAM, a.out / "DistanceHistogram.dat"))


if __name__ == "__main__":
    main()
