"""Per-dimension swarm potential, a read-only measurement over a SwarmState."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PotentialSnapshot:
    contributions: np.ndarray  # (N, D), phi[n, d] = |V| + |G - X|
    totals: np.ndarray  # (D,), column sums in ascending particle order
    iteration: int

    def below(self, delta: float) -> np.ndarray:
        """Per dimension: does every particle contribute less than delta."""
        return np.all(self.contributions < delta, axis=0)


def contribution(state, particle: int, dim: int) -> float:
    return abs(state.V[particle, dim]) + abs(state.G[dim] - state.X[particle, dim])


def contributions(state) -> np.ndarray:
    return np.abs(state.V) + np.abs(state.G[None, :] - state.X)


def snapshot(state) -> PotentialSnapshot:
    phi = contributions(state)
    totals = np.zeros(phi.shape[1])
    for row in phi:  # fixed summation order
        totals += row
    return PotentialSnapshot(phi, totals, state.iteration)
