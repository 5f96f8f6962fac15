"""Benchmark objectives with analytic gradients.

Objective values are computed by a single numba function shared by the
reference engine and the compiled swarm kernel, so both paths see
bit-identical function values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from numba import njit


class Benchmark(IntEnum):
    SPHERE = 0
    HCELLIPTIC = 1
    SCHWEFEL12 = 2
    RASTRIGIN = 3
    ROSENBROCK = 4


NAMES = {
    "sphere": Benchmark.SPHERE,
    "hcelliptic": Benchmark.HCELLIPTIC,
    "schwefel12": Benchmark.SCHWEFEL12,
    "rastrigin": Benchmark.RASTRIGIN,
    "rosenbrock": Benchmark.ROSENBROCK,
}

_INIT_HALF_WIDTH = {
    Benchmark.SPHERE: 100.0,
    Benchmark.HCELLIPTIC: 100.0,
    Benchmark.SCHWEFEL12: 100.0,
    Benchmark.RASTRIGIN: 5.12,
    Benchmark.ROSENBROCK: 30.0,
}


class DimensionMismatch(ValueError):
    pass


@njit(cache=True, nogil=True)
def objective_value(fid, x):
    D = x.shape[0]
    total = 0.0
    if fid == 0:
        for d in range(D):
            total += x[d] * x[d]
    elif fid == 1:
        for d in range(D):
            expo = 0.0 if D == 1 else 6.0 * d / (D - 1)
            total += 10.0**expo * x[d] * x[d]
    elif fid == 2:
        partial = 0.0
        for d in range(D):
            partial += x[d]
            total += partial * partial
    elif fid == 3:
        # 10 - 10 cos(2 pi x) written as 20 sin^2(pi x): same function, no cancellation near 0
        for d in range(D):
            s = math.sin(math.pi * x[d])
            total += x[d] * x[d] + 20.0 * s * s
    else:
        for d in range(D - 1):
            a = x[d + 1] - x[d] * x[d]
            b = 1.0 - x[d]
            total += 100.0 * a * a + b * b
    return total


def _gradient(fid: Benchmark, x: np.ndarray) -> np.ndarray:
    D = x.shape[0]
    if fid == Benchmark.SPHERE:
        return 2.0 * x
    if fid == Benchmark.HCELLIPTIC:
        expo = np.zeros(D) if D == 1 else 6.0 * np.arange(D) / (D - 1)
        return 2.0 * 10.0**expo * x
    if fid == Benchmark.SCHWEFEL12:
        partial = np.cumsum(x)
        # d/dx_j sum_k S_k^2 = 2 * sum_{k >= j} S_k
        return 2.0 * np.cumsum(partial[::-1])[::-1]
    if fid == Benchmark.RASTRIGIN:
        return 2.0 * x + 20.0 * np.pi * np.sin(2.0 * np.pi * x)
    g = np.zeros(D)
    a = x[1:] - x[:-1] ** 2
    g[:-1] += -400.0 * x[:-1] * a - 2.0 * (1.0 - x[:-1])
    g[1:] += 200.0 * a
    return g


@dataclass(frozen=True)
class Objective:
    """A benchmark function bound to a dimension."""

    benchmark: Benchmark
    dimension: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.benchmark == Benchmark.ROSENBROCK and self.dimension < 2:
            raise ValueError("rosenbrock needs dimension >= 2")

    @property
    def name(self) -> str:
        return self.benchmark.name.lower()

    @property
    def fid(self) -> int:
        return int(self.benchmark)

    def _check(self, x) -> np.ndarray:
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.shape != (self.dimension,):
            raise DimensionMismatch(f"{self.name}: expected shape ({self.dimension},), got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError(f"{self.name}: non-finite input")
        return x

    def evaluate(self, x) -> float:
        return float(objective_value(self.fid, self._check(x)))

    __call__ = evaluate

    def gradient(self, x) -> np.ndarray:
        return _gradient(self.benchmark, self._check(x))

    def gradient_norm(self, x) -> float:
        return float(np.linalg.norm(self.gradient(x)))

    @property
    def init_box(self) -> tuple[np.ndarray, np.ndarray]:
        w = _INIT_HALF_WIDTH[self.benchmark]
        return np.full(self.dimension, -w), np.full(self.dimension, w)

    @property
    def known_optimum(self) -> np.ndarray:
        if self.benchmark == Benchmark.ROSENBROCK:
            return np.ones(self.dimension)
        return np.zeros(self.dimension)

    known_optimal_value = 0.0


def get_objective(name: str | Benchmark, dimension: int) -> Objective:
    if isinstance(name, Benchmark):
        return Objective(name, dimension)
    try:
        return Objective(NAMES[name.lower()], dimension)
    except KeyError:
        raise ValueError(f"unknown objective {name!r}; choose from {sorted(NAMES)}") from None


def evaluate(name: str | Benchmark, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    return get_objective(name, x.shape[0]).evaluate(x)


def gradient(name: str | Benchmark, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return get_objective(name, x.shape[0]).gradient(x)
