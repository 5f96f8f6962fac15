"""Swarm state and the classical / forced (f-PSO) movement rules.

Two execution paths share one state layout and one random stream:

* ``step_particle`` / ``step_iteration`` -- plain Python, one move at a time,
  used for instrumentation and as the reference in tests;
* ``advance`` -- the compiled kernel, used for every long run.

Random numbers come from numpy's PCG64. A run's generator is seeded with
``SeedSequence(entropy=rng_seed, spawn_key=(rng_stream,))``, so replicate k of
an experiment with master seed s uses stream k of seed s. Per move, dimensions
are processed in ascending order; a regular update draws r then s, a forced
update draws t.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import _kernel
from .benchmarks import Objective

CHI = 0.72984
C1 = 1.49617
C2 = 1.49617
DELTA = 1e-7


class Mode(str, Enum):
    CLASSICAL = "classical"
    FORCED = "forced"


class NonFiniteObjective(RuntimeError):
    def __init__(self, iteration, particle, position):
        self.iteration = iteration
        self.particle = particle
        self.position = np.array(position)
        super().__init__(
            f"objective returned a non-finite value at iteration {iteration}, particle {particle}"
        )


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class SwarmConfig:
    num_particles: int
    num_dimensions: int
    chi: float = CHI
    c1: float = C1
    c2: float = C2
    delta: float = DELTA
    init_low: tuple | None = None
    init_high: tuple | None = None
    rng_seed: int = 0
    rng_stream: int = 0
    mode: Mode = Mode.FORCED

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if min(self.chi, self.c1, self.c2, self.delta) <= 0:
            raise ValueError("chi, c1, c2 and delta must be positive")
        if self.num_particles < 2:
            raise ValueError("need at least 2 particles")
        if self.num_dimensions < 1:
            raise ValueError("need at least 1 dimension")
        for name in ("init_low", "init_high"):
            box = getattr(self, name)
            if box is not None:
                box = tuple(float(b) for b in np.broadcast_to(box, (self.num_dimensions,)))
                object.__setattr__(self, name, box)
        if self.init_low is not None and self.init_high is not None:
            if not all(lo < hi for lo, hi in zip(self.init_low, self.init_high)):
                raise ValueError("init_low must be strictly below init_high in every dimension")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must be a 64-bit unsigned integer")

    def with_(self, **kw) -> "SwarmConfig":
        return replace(self, **kw)

    def box_for(self, objective: Objective) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = objective.init_box if hasattr(objective, "init_box") else (None, None)
        if self.init_low is not None:
            lo = np.array(self.init_low)
        if self.init_high is not None:
            hi = np.array(self.init_high)
        if lo is None or hi is None:
            raise ValueError("no initialization box for this objective; set init_low/init_high")
        if not np.all(lo < hi):
            raise ValueError("empty initialization box")
        return lo, hi


@dataclass(frozen=True)
class ParticleState:
    position: np.ndarray
    velocity: np.ndarray
    local_attractor: np.ndarray
    local_value: float


@dataclass(frozen=True)
class MoveOutcome:
    particle: int
    iteration: int
    forced_dimensions: frozenset = frozenset()
    local_updated: bool = False
    global_updated: bool = False


@dataclass
class SwarmState:
    config: SwarmConfig
    X: np.ndarray
    V: np.ndarray
    L: np.ndarray
    local_values: np.ndarray
    G: np.ndarray
    global_value: float
    rng: np.random.Generator
    iteration: int = 0
    local_updates: int = 0
    global_updates: int = 0

    @property
    def num_particles(self) -> int:
        return self.X.shape[0]

    @property
    def num_dimensions(self) -> int:
        return self.X.shape[1]

    def particle(self, n: int) -> ParticleState:
        return ParticleState(self.X[n].copy(), self.V[n].copy(), self.L[n].copy(),
                             float(self.local_values[n]))

    @property
    def particles(self) -> list[ParticleState]:
        return [self.particle(n) for n in range(self.num_particles)]

    def copy(self) -> "SwarmState":
        rng = np.random.Generator(np.random.PCG64())
        rng.bit_generator.state = self.rng.bit_generator.state
        return SwarmState(self.config, self.X.copy(), self.V.copy(), self.L.copy(),
                          self.local_values.copy(), self.G.copy(), self.global_value, rng,
                          self.iteration, self.local_updates, self.global_updates)

    def same_as(self, other: "SwarmState") -> bool:
        """Bitwise equality of all arrays, counters and generator state."""
        arrays = ("X", "V", "L", "local_values", "G")
        return (
            all(np.array_equal(getattr(self, a), getattr(other, a)) for a in arrays)
            and self.global_value == other.global_value
            and self.iteration == other.iteration
            and self.rng.bit_generator.state == other.rng.bit_generator.state
        )


def _dimension_of(objective) -> int | None:
    return getattr(objective, "dimension", None)


def _state_from_positions(config, objective, X, rng) -> SwarmState:
    X = np.array(X, dtype=np.float64, order="C")
    N = X.shape[0]
    values = np.array([objective(X[n]) for n in range(N)], dtype=np.float64)
    if not np.all(np.isfinite(values)):
        n = int(np.flatnonzero(~np.isfinite(values))[0])
        raise NonFiniteObjective(0, n, X[n])
    best = int(np.argmin(values))  # first index wins ties
    return SwarmState(config, X, np.zeros_like(X), X.copy(), values, X[best].copy(),
                      float(values[best]), rng)


def initialize(config: SwarmConfig, objective, positions=None) -> SwarmState:
    """Uniform positions in the init box, zero velocities, L = X, G = best L.

    ``positions`` overrides the random draw (the generator is still seeded
    but not consumed).
    """
    dim = _dimension_of(objective)
    if dim is not None and dim != config.num_dimensions:
        raise ValueError(f"objective dimension {dim} != config.num_dimensions {config.num_dimensions}")
    rng = make_rng(config.rng_seed, config.rng_stream)
    N, D = config.num_particles, config.num_dimensions
    if positions is None:
        lo, hi = config.box_for(objective)
        X = lo + (hi - lo) * rng.random((N, D))
    else:
        X = np.asarray(positions, dtype=np.float64)
        if X.shape != (N, D):
            raise ValueError(f"positions must have shape {(N, D)}")
    return _state_from_positions(config, objective, X, rng)


def plant(config: SwarmConfig, objective, point) -> SwarmState:
    """Every position, local attractor and the global attractor at ``point``, V = 0."""
    point = np.asarray(point, dtype=np.float64)
    X = np.tile(point, (config.num_particles, 1))
    return initialize(config, objective, positions=X)


def regular_velocity_update(state: SwarmState, n: int, d: int) -> float:
    """chi*V + c1*r*(L - X) + c2*s*(G - X); draws r then s."""
    cfg = state.config
    r = state.rng.random()
    s = state.rng.random()
    x = state.X[n, d]
    return cfg.chi * state.V[n, d] + cfg.c1 * r * (state.L[n, d] - x) + cfg.c2 * s * (state.G[d] - x)


def forced_condition(state: SwarmState, d: int, delta: float) -> bool:
    g = state.G[d]
    for m in range(state.num_particles):
        if not abs(state.V[m, d]) + abs(g - state.X[m, d]) < delta:
            return False
    return True


def forced_velocity_update(rng, delta: float) -> float:
    """Uniform on [-delta, delta]; one draw."""
    t = rng.random()
    return (2.0 * t - 1.0) * delta


def step_particle(state: SwarmState, n: int, objective) -> MoveOutcome:
    cfg = state.config
    forced = []
    for d in range(state.num_dimensions):
        if cfg.mode is Mode.FORCED and forced_condition(state, d, cfg.delta):
            v = forced_velocity_update(state.rng, cfg.delta)
            forced.append(d)
        else:
            v = regular_velocity_update(state, n, d)
        state.V[n, d] = v
        state.X[n, d] = state.X[n, d] + v
    fx = objective(state.X[n])
    if not np.isfinite(fx):
        raise NonFiniteObjective(state.iteration, n, state.X[n])
    local = global_ = False
    if fx <= state.local_values[n]:
        state.L[n] = state.X[n]
        state.local_values[n] = fx
        state.local_updates += 1
        local = True
    if fx <= state.global_value:
        state.G[:] = state.X[n]
        state.global_value = float(fx)
        state.global_updates += 1
        global_ = True
    return MoveOutcome(n, state.iteration, frozenset(forced), local, global_)


def step_iteration(state: SwarmState, objective) -> list[MoveOutcome]:
    outcomes = [step_particle(state, n, objective) for n in range(state.num_particles)]
    state.iteration += 1
    return outcomes


@dataclass
class AdvanceResult:
    iterations: int
    local_updates: int
    global_updates: int
    forced_counts: np.ndarray = field(repr=False)


def advance(state: SwarmState, objective: Objective, iterations: int, counts=None,
            trace=None, dist_trace=None, mutation: int = _kernel.MUT_NONE) -> AdvanceResult:
    """Run ``iterations`` iterations with the compiled kernel.

    ``counts`` (int64, length D) accumulates forced updates per dimension.
    ``trace`` / ``dist_trace`` are optional preallocated buffers, see ``_kernel``.
    """
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    cfg = state.config
    D = state.num_dimensions
    if counts is None:
        counts = np.zeros(D, dtype=np.int64)
    gval = np.array([state.global_value])
    status, done, nl, ng, bad = _kernel.advance(
        state.X, state.V, state.L, state.local_values, state.G, gval, state.rng,
        objective.fid, cfg.chi, cfg.c1, cfg.c2, cfg.delta, cfg.mode is Mode.FORCED, mutation,
        iterations, counts,
        _kernel.EMPTY_TRACE if trace is None else trace,
        _kernel.EMPTY_DIST if dist_trace is None else dist_trace,
    )
    state.global_value = float(gval[0])
    state.iteration += done
    state.local_updates += nl
    state.global_updates += ng
    if status == _kernel.NON_FINITE:
        raise NonFiniteObjective(state.iteration, bad, state.X[bad])
    return AdvanceResult(done, nl, ng, counts)
