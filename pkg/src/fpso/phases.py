"""Monte-Carlo checks of the pulsation-phase behaviour at a fixed optimum.

All checks run on a *trace*: for every iteration, particle and dimension, one
int8 code recording whether the velocity update was forced, whether the
particle's contribution |V| + |G - X| ended at or above delta, and for forced
moves the sign case of (G - X, new V). Attractors are pinned at the optimum,
so the moves of one dimension form a single stream ordered by iteration, then
particle.

Checks:
    lockout       after a contribution >= delta, the next N moves are unforced
    half          P[next move forced | this move forced] = 1/2
    geometric     forced-run lengths ~ Geometric(1/2) on {1, 2, ...}
    recovery      P[contribution >= delta | first unforced move after a forced
                  one] >= (1 - 1/(2 chi)) / 2
    theorem       each stream parses as (forced run, >= N unforced)*
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum

import numpy as np
from scipy import stats

from . import _kernel, swarm
from .benchmarks import get_objective
from .telemetry import segment_runs

ALPHA = 0.01
Z = 3.0
GEOMETRIC_BINS = 10


class InsufficientSamples(RuntimeError):
    pass


class Lemma(str, Enum):
    L1_LOCKOUT = "L1_Lockout"
    L2_HALF_PROB = "L2_HalfProb"
    L3_GEOMETRIC = "L3_Geometric"
    L4_RECOVERY_BOUND = "L4_RecoveryBound"


@dataclass
class LemmaReport:
    lemma: Lemma
    samples: int
    statistic: float
    expected: float
    standard_error: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lemma"] = self.lemma.value
        return d


@dataclass(frozen=True)
class HarnessConfig:
    num_particles: int = 5
    num_dimensions: int = 15
    iterations: int = 200_000
    warmup: int = 1_000
    delta: float = swarm.DELTA
    chi: float = swarm.CHI
    c1: float = swarm.C1
    c2: float = swarm.C2
    seed: int = 2024
    stream: int = 0
    mode: swarm.Mode = swarm.Mode.FORCED
    mutation: int = _kernel.MUT_NONE
    objective: str = "sphere"


@dataclass
class PhaseTrace:
    config: HarnessConfig
    codes: np.ndarray = field(repr=False)  # (T, N, D) int8
    attractor_updates: int = 0

    @property
    def num_particles(self) -> int:
        return self.codes.shape[1]

    @property
    def forced(self) -> np.ndarray:
        return (self.codes & _kernel.FORCED_BIT) != 0

    @property
    def phi_ge(self) -> np.ndarray:
        return (self.codes & _kernel.PHI_GE_BIT) != 0

    @property
    def cases(self) -> np.ndarray:
        return self.codes >> _kernel.CASE_SHIFT

    def streams(self, arr: np.ndarray) -> np.ndarray:
        """(D, T*N) view: each row is one dimension in execution order."""
        T, N, D = arr.shape
        return arr.reshape(T * N, D).T


def record_trace(config: HarnessConfig) -> PhaseTrace:
    obj = get_objective(config.objective, config.num_dimensions)
    cfg = swarm.SwarmConfig(config.num_particles, config.num_dimensions, config.chi, config.c1,
                            config.c2, config.delta, rng_seed=config.seed,
                            rng_stream=config.stream, mode=config.mode)
    state = swarm.plant(cfg, obj, obj.known_optimum)
    swarm.advance(state, obj, config.warmup, mutation=config.mutation)
    before = state.local_updates + state.global_updates
    codes = np.zeros((config.iterations, config.num_particles, config.num_dimensions), dtype=np.int8)
    swarm.advance(state, obj, config.iterations, trace=codes, mutation=config.mutation)
    return PhaseTrace(config, codes, state.local_updates + state.global_updates - before)


def _require(samples: int, target: int, what: str):
    if samples == 0 or samples < target:
        raise InsufficientSamples(f"{what}: {samples} samples, need {max(target, 1)}")


# ---------------------------------------------------------------- lockout


def verify_lockout(trace: PhaseTrace) -> LemmaReport:
    N = trace.num_particles
    forced = trace.streams(trace.forced)
    phi_ge = trace.streams(trace.phi_ge)
    M = forced.shape[1]
    checked = violations = 0
    per_dim = []
    for f, p in zip(forced, phi_ge):
        cs = np.concatenate(([0], np.cumsum(f, dtype=np.int64)))
        k = np.flatnonzero(p[: M - N])  # only moves whose next N moves are in the trace
        ahead = cs[k + N + 1] - cs[k + 1]
        v = int(np.count_nonzero(ahead))
        per_dim.append(v)
        violations += v
        checked += len(k)
    return LemmaReport(Lemma.L1_LOCKOUT, checked, float(violations), 0.0, 0.0, violations == 0,
                       {"violations_per_dimension": per_dim,
                        "forced_moves": int(trace.forced.sum())})


# ---------------------------------------------------------------- half probability


def _half_test(hits: int, n: int) -> tuple[float, float, bool]:
    p = hits / n
    se = math.sqrt(0.25 / n)
    return p, se, abs(p - 0.5) <= Z * se


def verify_half_probability(trace: PhaseTrace, samples_target: int = 1) -> LemmaReport:
    forced = trace.streams(trace.forced)
    cases = trace.streams(trace.cases)
    total_hits = total_n = 0
    per_dim = []
    case_n = np.zeros(7, dtype=np.int64)
    case_hits = np.zeros(7, dtype=np.int64)
    for f, c in zip(forced, cases):
        cond = f[:-1]
        nxt = f[1:][cond]
        n, hits = int(cond.sum()), int(nxt.sum())
        total_n += n
        total_hits += hits
        if n:
            p, se, ok = _half_test(hits, n)
            per_dim.append({"samples": n, "statistic": p, "passed": ok})
        cc = c[:-1][cond]
        case_n += np.bincount(cc, minlength=7)
        case_hits += np.bincount(cc[nxt], minlength=7)
    _require(total_n, samples_target, "half-probability")
    p, se, ok = _half_test(total_hits, total_n)
    case_table = {
        str(k): {"samples": int(case_n[k]),
                 "conditional": float(case_hits[k] / case_n[k]) if case_n[k] else None,
                 "share_of_hits": float(case_hits[k] / total_hits) if total_hits else 0.0}
        for k in range(1, 7)
    }
    details = {"per_dimension": per_dim,
               "per_dimension_pass": all(d["passed"] for d in per_dim),
               "cases": case_table}
    return LemmaReport(Lemma.L2_HALF_PROB, total_n, p, 0.5, se, ok, details)


# ---------------------------------------------------------------- run lengths


def forced_run_lengths(trace: PhaseTrace) -> np.ndarray:
    """Lengths of forced runs that start and end strictly inside the trace."""
    out = []
    for f in trace.streams(trace.forced):
        seg = segment_runs(f)
        out.append(seg.lengths[seg.complete])
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def geometric_pmf(k) -> np.ndarray:
    """P[Y = k] = 2^-k for k >= 1 (equivalently P[Y >= k] = 2^-(k-1))."""
    return 0.5 ** np.asarray(k, dtype=float)


def verify_geometric(trace: PhaseTrace, samples_target: int = 1) -> LemmaReport:
    lengths = forced_run_lengths(trace)
    n = len(lengths)
    _require(n, samples_target, "geometric run lengths")
    ks = np.arange(1, GEOMETRIC_BINS + 1)
    observed = np.append([np.count_nonzero(lengths == k) for k in ks],
                         np.count_nonzero(lengths > GEOMETRIC_BINS))
    expected = n * np.append(geometric_pmf(ks), 0.5**GEOMETRIC_BINS)
    chi2, p_value = stats.chisquare(observed, expected)
    critical = float(stats.chi2.ppf(1 - ALPHA, df=len(observed) - 1))
    details = {
        "p_value": float(p_value),
        "alpha": ALPHA,
        "mean_length": float(lengths.mean()),
        "mean_length_se": float(lengths.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
        "empirical_pmf": {int(k): float(o / n) for k, o in zip(ks, observed[:-1])},
        "tail_mass": float(observed[-1] / n),
        "observed": observed.tolist(),
    }
    return LemmaReport(Lemma.L3_GEOMETRIC, n, float(chi2), critical, 0.0, bool(chi2 <= critical),
                       details)


# ---------------------------------------------------------------- recovery bound


def recovery_bound(chi: float) -> float:
    return 0.5 * (1.0 - 1.0 / (2.0 * chi))


def verify_recovery_bound(trace: PhaseTrace, samples_target: int = 1) -> LemmaReport:
    forced = trace.forced
    first_unforced = forced[:-1] & ~forced[1:]  # forced in iteration i-1, not in i
    outcome = trace.phi_ge[1:][first_unforced]
    n = int(outcome.size)
    _require(n, samples_target, "recovery bound")
    p = float(outcome.mean())
    se = math.sqrt(max(p * (1 - p), 1e-300) / n)
    bound = recovery_bound(trace.config.chi)
    details = {"chi": trace.config.chi, "vacuous": bound <= 0.0}
    return LemmaReport(Lemma.L4_RECOVERY_BOUND, n, p, bound, se, p >= bound - Z * se, details)


# ---------------------------------------------------------------- theorem


@dataclass
class TheoremReport:
    passed: bool
    unclassifiable: int
    min_unforced_span: int
    recovery_zero_count: int
    recovery_lengths: dict  # summary of unforced span minus N
    lockout_lengths: dict
    run_length_report: LemmaReport

    def to_dict(self) -> dict:
        d = asdict(self)
        d["run_length_report"] = self.run_length_report.to_dict()
        return d


def verify_theorem(trace: PhaseTrace) -> TheoremReport:
    """Each dimension's stream must read (forced run, lockout >= N, recovery >= 0)*."""
    N = trace.num_particles
    gaps = []
    for f in trace.streams(trace.forced):
        seg = segment_runs(f)
        gaps.append(seg.gaps)
    gaps = np.concatenate(gaps) if gaps else np.zeros(0, dtype=np.int64)
    bad = int(np.count_nonzero(gaps < N))
    recovery = gaps[gaps >= N] - N
    geo = verify_geometric(trace)
    hist = np.bincount(np.minimum(recovery, 50)) if recovery.size else np.zeros(0)
    return TheoremReport(
        passed=bad == 0 and recovery.size > 0 and geo.passed,
        unclassifiable=bad,
        min_unforced_span=int(gaps.min()) if gaps.size else 0,
        recovery_zero_count=int(np.count_nonzero(recovery == 0)),
        recovery_lengths={
            "count": int(recovery.size),
            "mean": float(recovery.mean()) if recovery.size else 0.0,
            "median": float(np.median(recovery)) if recovery.size else 0.0,
            "histogram_capped_at_50": hist.tolist(),
        },
        lockout_lengths={"minimum_observed_span": int(gaps.min()) if gaps.size else 0,
                         "asserted_lower_bound": N},
        run_length_report=geo,
    )


# ---------------------------------------------------------------- suite


def run_suite(config: HarnessConfig = HarnessConfig(), samples_target: int = 1_000_000,
              chi_values=(swarm.CHI,)) -> dict:
    """All lemma checks plus the theorem parse; one trace per chi value."""
    trace = record_trace(config)
    reports = {
        "lockout": verify_lockout(trace),
        "half_probability": verify_half_probability(trace, samples_target),
        "geometric": verify_geometric(trace),
        "recovery": [],
        "theorem": verify_theorem(trace),
        "attractor_updates": trace.attractor_updates,
    }
    for chi in chi_values:
        t = trace if chi == config.chi else record_trace(replace(config, chi=chi))
        reports["recovery"].append(verify_recovery_bound(t, samples_target))
    return reports


def suite_passed(reports: dict) -> bool:
    return (reports["lockout"].passed and reports["half_probability"].passed
            and reports["geometric"].passed and all(r.passed for r in reports["recovery"])
            and reports["theorem"].passed)


def suite_to_json(reports: dict) -> str:
    out = {}
    for k, v in reports.items():
        if isinstance(v, list):
            out[k] = [r.to_dict() for r in v]
        elif hasattr(v, "to_dict"):
            out[k] = v.to_dict()
        else:
            out[k] = v
    out["passed"] = suite_passed(reports)
    return json.dumps(out, indent=2, default=float)
