"""Particle swarm optimization with forced moves and forcing-frequency stopping rules."""
from .benchmarks import Benchmark, Objective, get_objective
from .calibration import CalibrationConfig, CalibrationResult, calibrate, scaling_sweep
from .experiments import ExperimentConfig, RunRecord, run_experiment, run_single, summarize
from .stopping import FullStop, MaxIterations, PartialStop, TerminationReport
from .swarm import CHI, C1, C2, DELTA, Mode, SwarmConfig, SwarmState, initialize, plant
from .telemetry import IntervalStats, WindowMode

__all__ = [
    "Benchmark", "Objective", "get_objective",
    "CalibrationConfig", "CalibrationResult", "calibrate", "scaling_sweep",
    "ExperimentConfig", "RunRecord", "run_experiment", "run_single", "summarize",
    "FullStop", "MaxIterations", "PartialStop", "TerminationReport",
    "CHI", "C1", "C2", "DELTA", "Mode", "SwarmConfig", "SwarmState", "initialize", "plant",
    "IntervalStats", "WindowMode",
]
