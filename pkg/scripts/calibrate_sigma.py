"""Measure the stagnation frequency at the standard setting and save it.

    python3 scripts/calibrate_sigma.py --out results/calibration

The resulting calibration.json can be passed to ``fpso run --sigma-stag``.
"""
import argparse
from pathlib import Path

from fpso.calibration import CalibrationConfig, calibrate


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--particles", type=int, default=5)
    p.add_argument("--dimensions", type=int, default=15)
    p.add_argument("--mu", type=int, default=50_000)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("results/calibration"))
    a = p.parse_args()

    res = calibrate(CalibrationConfig(num_particles=a.particles, num_dimensions=a.dimensions,
                                      mu=a.mu, trials=a.trials, seed=a.seed))
    a.out.mkdir(parents=True, exist_ok=True)
    res.write(a.out / "samples.csv", a.out / "calibration.json")
    print(f"sigma_stag {res.sigma_stag}  mean {res.sigma_stag_mean:.1f}  "
          f"std {res.sigma_stag_std:.1f}  se {res.standard_error:.1f}")
    print(f"per-dimension mean {res.per_dim_mean.mean():.1f}  relative {res.relative_mean:.4f}")
    print(f"attractor updates while sampling: {res.attractor_updates}")


if __name__ == "__main__":
    main()
