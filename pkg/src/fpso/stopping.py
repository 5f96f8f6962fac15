"""Termination rules: iteration budget, full stop and partial stop.

Frequency rules compare the number of forced updates sigma(I) in a finished
window of mu iterations against the stagnation frequency sigma_stag measured
by calibration:

    full stop     sigma_stag - sigma(I) <= gamma
    partial stop  sigma(I) >= kappa * (sigma_stag - gamma) / D
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum

from .telemetry import IntervalStats


class Cause(str, Enum):
    BUDGET = "Budget"
    FULL_STOP = "FullStop"
    PARTIAL_STOP = "PartialStop"


@dataclass(frozen=True)
class MaxIterations:
    limit: int

    def __post_init__(self):
        if self.limit < 0:
            raise ValueError("limit must be non-negative")


@dataclass(frozen=True)
class FullStop:
    sigma_stag: int
    gamma: int
    mu: int

    def __post_init__(self):
        _check_frequency_params(self.sigma_stag, self.gamma, self.mu)

    @property
    def threshold(self) -> float:
        return float(self.sigma_stag - self.gamma)


@dataclass(frozen=True)
class PartialStop:
    sigma_stag: int
    gamma: int
    mu: int
    kappa: float
    num_dimensions: int

    def __post_init__(self):
        _check_frequency_params(self.sigma_stag, self.gamma, self.mu)
        if not 1 <= self.kappa <= self.num_dimensions:
            raise ValueError("kappa must lie in [1, D]")

    @property
    def threshold(self) -> float:
        return self.kappa * (self.sigma_stag - self.gamma) / self.num_dimensions


StoppingRule = MaxIterations | FullStop | PartialStop


def _check_frequency_params(sigma_stag, gamma, mu):
    if mu < 1:
        raise ValueError("mu must be >= 1")
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    if not sigma_stag > gamma:
        raise ValueError("sigma_stag must exceed gamma")


@dataclass(frozen=True)
class TerminationReport:
    cause: Cause
    iteration: int
    triggering_sigma: int | None
    threshold: float
    best_value: float | None = None
    gradient_norm: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cause"] = self.cause.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TerminationReport":
        return cls(**{**d, "cause": Cause(d["cause"])})


def full_stop_check(sigma_I: int, rule: FullStop) -> bool:
    return rule.sigma_stag - sigma_I <= rule.gamma


def partial_stop_check(sigma_I: int, rule: PartialStop, num_dimensions: int | None = None) -> bool:
    D = rule.num_dimensions if num_dimensions is None else num_dimensions
    if D != rule.num_dimensions:
        rule = PartialStop(rule.sigma_stag, rule.gamma, rule.mu, rule.kappa, D)
    # at kappa == D this is exactly the full-stop inequality
    if rule.kappa == D:
        return sigma_I >= rule.sigma_stag - rule.gamma
    return sigma_I >= rule.threshold


def evaluate(rule: StoppingRule, stats: IntervalStats | None, iteration: int) -> TerminationReport | None:
    """Report if ``rule`` fires at ``iteration``.

    Budgets are checked against the iteration counter; frequency rules need
    the window that just closed at ``iteration``.
    """
    if isinstance(rule, MaxIterations):
        if iteration >= rule.limit:
            return TerminationReport(Cause.BUDGET, iteration, None, float(rule.limit))
        return None
    if stats is None:
        return None
    if stats.length != rule.mu or stats.interval_end != iteration:
        raise ValueError("frequency rules are evaluated on the window of length mu ending now")
    sigma = stats.total_forced
    if isinstance(rule, FullStop):
        if full_stop_check(sigma, rule):
            return TerminationReport(Cause.FULL_STOP, iteration, sigma, rule.threshold)
        return None
    if partial_stop_check(sigma, rule):
        return TerminationReport(Cause.PARTIAL_STOP, iteration, sigma, rule.threshold)
    return None


def rule_to_dict(rule: StoppingRule) -> dict:
    return {"type": type(rule).__name__, **asdict(rule)}


def rule_from_dict(d: dict) -> StoppingRule:
    d = dict(d)
    kind = d.pop("type")
    return {"MaxIterations": MaxIterations, "FullStop": FullStop, "PartialStop": PartialStop}[kind](**d)


def rule_label(rule: StoppingRule) -> str:
    if isinstance(rule, MaxIterations):
        return f"budget={rule.limit}"
    if isinstance(rule, FullStop):
        return f"full(sigma_stag={rule.sigma_stag},gamma={rule.gamma},mu={rule.mu})"
    return f"partial(kappa={rule.kappa:g},sigma_stag={rule.sigma_stag},gamma={rule.gamma},mu={rule.mu})"
