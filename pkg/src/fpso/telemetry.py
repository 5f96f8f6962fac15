"""Forcing-frequency counters and forced/lockout/recovery phase segmentation."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum

import numpy as np


class WindowMode(str, Enum):
    SLIDING = "sliding"  # disjoint windows [k*mu, (k+1)*mu)
    CUMULATIVE = "cumulative"  # growing windows [0, (k+1)*mu)


class ContractViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class IntervalStats:
    interval_start: int
    interval_end: int
    per_dim_forced: np.ndarray
    window_index: int = 0
    window_mode: WindowMode = WindowMode.SLIDING

    @property
    def total_forced(self) -> int:
        return int(self.per_dim_forced.sum())

    @property
    def length(self) -> int:
        return self.interval_end - self.interval_start

    def __add__(self, other: "IntervalStats") -> "IntervalStats":
        if other.interval_start != self.interval_end:
            raise ValueError("intervals are not adjacent")
        return IntervalStats(self.interval_start, other.interval_end,
                             self.per_dim_forced + other.per_dim_forced, self.window_index,
                             self.window_mode)


def relative_frequency(stats: IntervalStats) -> tuple[float, np.ndarray]:
    """sigma(I)/|I| and sigma(I, d)/|I|."""
    if stats.length <= 0:
        raise ValueError("empty interval")
    return stats.total_forced / stats.length, stats.per_dim_forced / stats.length


class ForcingCounter:
    """Accumulates forced updates into consecutive windows of ``window`` iterations.

    Moves can be fed one at a time (``record_move``) or as per-dimension
    count vectors from the compiled kernel (``add_counts``).
    """

    def __init__(self, num_dimensions: int, window: int, mode: WindowMode = WindowMode.SLIDING,
                 start: int = 0):
        if window < 1:
            raise ValueError("window must be >= 1")
        self.window = window
        self.mode = WindowMode(mode)
        self.origin = start
        self.start = start
        self.index = 0
        self.current = np.zeros(num_dimensions, dtype=np.int64)
        self.cumulative = np.zeros(num_dimensions, dtype=np.int64)
        self.closed: list[IntervalStats] = []

    @property
    def end(self) -> int:
        return self.start + self.window

    def record_move(self, outcome) -> None:
        if not self.start <= outcome.iteration < self.end:
            raise ContractViolation(
                f"move at iteration {outcome.iteration} outside window [{self.start}, {self.end})")
        for d in outcome.forced_dimensions:
            self.current[d] += 1

    def add_counts(self, counts) -> None:
        self.current += counts

    def close(self) -> IntervalStats:
        self.cumulative += self.current
        if self.mode is WindowMode.CUMULATIVE:
            stats = IntervalStats(self.origin, self.end, self.cumulative.copy(), self.index, self.mode)
        else:
            stats = IntervalStats(self.start, self.end, self.current.copy(), self.index, self.mode)
        self.closed.append(stats)
        self.current[:] = 0
        self.start = self.end
        self.index += 1
        return stats


STATS_HEADER_PREFIX = ["run_id", "window_index", "window_mode", "sigma_total"]


def stats_header(num_dimensions: int) -> list[str]:
    return STATS_HEADER_PREFIX + [f"sigma_d_{d + 1}" for d in range(num_dimensions)]


def stats_row(run_id, stats: IntervalStats) -> list:
    return [run_id, stats.window_index, stats.window_mode.value, stats.total_forced,
            *(int(c) for c in stats.per_dim_forced)]


def write_stats_csv(path, rows: list[tuple[object, IntervalStats]]) -> None:
    if not rows:
        raise ValueError("no interval stats to write")
    D = len(rows[0][1].per_dim_forced)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(stats_header(D))
        for run_id, stats in rows:
            w.writerow(stats_row(run_id, stats))


def read_stats_csv(path, window: int) -> list[tuple[str, IntervalStats]]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            k = int(row["window_index"])
            mode = WindowMode(row["window_mode"])
            per_dim = np.array([int(v) for key, v in row.items() if key.startswith("sigma_d_")],
                               dtype=np.int64)
            start = 0 if mode is WindowMode.CUMULATIVE else k * window
            out.append((row["run_id"], IntervalStats(start, (k + 1) * window, per_dim, k, mode)))
    return out


# ---------------------------------------------------------------- phases


class PhaseKind(str, Enum):
    FORCED_RUN_START = "ForcedRunStart"
    FORCED_RUN_END = "ForcedRunEnd"
    LOCKOUT_END = "LockoutEnd"
    RECOVERY_END = "RecoveryEnd"


@dataclass(frozen=True)
class PhaseEvent:
    kind: PhaseKind
    dim: int
    particle: int
    iteration: int
    run_length: int | None = None

    def __post_init__(self):
        if (self.kind is PhaseKind.FORCED_RUN_END) != (self.run_length is not None):
            raise ValueError("run_length is required exactly for ForcedRunEnd")
        if self.run_length is not None and self.run_length < 1:
            raise ValueError("run_length must be >= 1")


@dataclass(frozen=True)
class Segments:
    """Forced runs of one dimension's move stream (moves ordered by iteration, then particle)."""

    starts: np.ndarray  # move index of each run's first forced move
    lengths: np.ndarray  # run lengths
    complete: np.ndarray  # bool: run and the gap after it lie fully inside the stream
    gaps: np.ndarray  # unforced moves between run k and run k+1 (len = runs - 1)


def segment_runs(forced) -> Segments:
    f = np.asarray(forced, dtype=bool)
    padded = np.concatenate(([False], f, [False])).astype(np.int8)
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    lengths = ends - starts
    gaps = starts[1:] - ends[:-1]
    complete = (starts > 0) & (ends < len(f))
    return Segments(starts, lengths, complete, gaps)


def track_phases(forced, num_particles: int, dim: int = 0, start_iteration: int = 0,
                 attractor_updates: int = 0) -> list[PhaseEvent]:
    """Split one dimension's forced/unforced move stream into phase events.

    ``forced`` lists the moves of a single dimension in execution order
    (iteration-major, particle-minor). Each forced run is followed by a
    lockout of ``num_particles`` moves and a recovery lasting until the next
    forced move. The segmentation assumes fixed attractors; a stream recorded
    while attractors moved is rejected.
    """
    if attractor_updates:
        raise ContractViolation("phase tracking requires constant attractors")
    N = num_particles
    seg = segment_runs(forced)
    n_moves = len(np.asarray(forced))
    events = []

    def at(k):
        return start_iteration + k // N, k % N

    for i, (s, length) in enumerate(zip(seg.starts, seg.lengths)):
        it, p = at(s)
        events.append(PhaseEvent(PhaseKind.FORCED_RUN_START, dim, p, it))
        e = s + length - 1
        it, p = at(e)
        events.append(PhaseEvent(PhaseKind.FORCED_RUN_END, dim, p, it, int(length)))
        next_start = seg.starts[i + 1] if i + 1 < len(seg.starts) else n_moves
        lock_end = min(e + N, next_start - 1, n_moves - 1)
        if lock_end > e:
            it, p = at(lock_end)
            events.append(PhaseEvent(PhaseKind.LOCKOUT_END, dim, p, it))
        if i + 1 < len(seg.starts) and next_start - 1 > e + N:
            it, p = at(next_start - 1)
            events.append(PhaseEvent(PhaseKind.RECOVERY_END, dim, p, it))
    return events
