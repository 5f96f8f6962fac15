"""Compiled inner loop of the swarm.

``advance`` performs whole iterations on the raw state arrays. Arithmetic and
RNG consumption mirror ``swarm.step_particle`` exactly; the test suite checks
the two paths produce bit-identical states from the same generator.

Trace codes (one int8 per particle move and dimension):
    bit 0      forced velocity update applied
    bit 1      contribution |V| + |G - X| >= delta after the move
    bits 2..4  sign case of (G - X before the move, new V) for forced moves, 1..6
"""
import numpy as np
from numba import njit

from .benchmarks import objective_value

# engine mutations, used only to show the statistical verifiers are not vacuous
MUT_NONE = 0
MUT_OWN_CONTRIBUTION_ONLY = 1  # forced test looks at the moving particle only
MUT_WIDE_FORCED_RANGE = 2  # forced velocity drawn from [-2 delta, 2 delta]
MUT_NARROW_FORCED_RANGE = 3  # forced velocity drawn from [-delta/10, delta/10]
MUT_NONSTRICT_COMPARISON = 4  # <= delta instead of < delta
MUT_ONE_SIDED_FORCED_RANGE = 5  # forced velocity t*delta, i.e. [0, delta]
MUT_NO_INERTIA = 6  # regular update drops the chi*V term
MUT_DOUBLE_CONSTRICTION = 7  # regular velocity scaled by an extra chi**2

OK = 0
NON_FINITE = 1

FORCED_BIT = 1
PHI_GE_BIT = 2
CASE_SHIFT = 2

EMPTY_TRACE = np.zeros((0, 0, 0), dtype=np.int8)
EMPTY_DIST = np.zeros(0, dtype=np.float64)


@njit(cache=True, nogil=True)
def _sign_case(dist, v):
    if dist >= 0.0:
        if v >= dist:
            return 1
        if v >= 0.0:
            return 2
        return 3
    if v < 0.0:
        if v >= dist:
            return 4
        return 5
    return 6


@njit(cache=True, nogil=True)
def advance(X, V, L, Lval, G, Gval, rng, fid, chi, c1, c2, delta, forced_mode,
            mutation, n_iters, counts, trace, dist_trace):
    """Run ``n_iters`` iterations in place.

    ``counts[d]`` is incremented per forced update in dimension d. ``trace``
    has shape (n_iters, N, D) or is empty; ``dist_trace`` records G - X of
    particle 0 in dimension 0 after each of its moves, or is empty.

    Returns (status, iterations_done, local_updates, global_updates, particle).
    """
    N, D = X.shape
    tracing = trace.shape[0] > 0
    dist_tracing = dist_trace.shape[0] > 0
    scale = 1.0
    if mutation == MUT_WIDE_FORCED_RANGE:
        scale = 2.0
    elif mutation == MUT_NARROW_FORCED_RANGE:
        scale = 0.1
    n_local = 0
    n_global = 0
    for it in range(n_iters):
        for n in range(N):
            for d in range(D):
                g = G[d]
                x = X[n, d]
                force = False
                if forced_mode:
                    if mutation == MUT_OWN_CONTRIBUTION_ONLY:
                        force = abs(V[n, d]) + abs(g - x) < delta
                    elif mutation == MUT_NONSTRICT_COMPARISON:
                        force = True
                        for m in range(N):
                            if abs(V[m, d]) + abs(g - X[m, d]) > delta:
                                force = False
                                break
                    else:
                        force = True
                        for m in range(N):
                            if not (abs(V[m, d]) + abs(g - X[m, d]) < delta):
                                force = False
                                break
                if force:
                    t = rng.random()
                    if mutation == MUT_ONE_SIDED_FORCED_RANGE:
                        v = t * delta
                    else:
                        v = (2.0 * t - 1.0) * delta * scale
                    counts[d] += 1
                else:
                    r = rng.random()
                    s = rng.random()
                    v = chi * V[n, d] + c1 * r * (L[n, d] - x) + c2 * s * (g - x)
                    if mutation == MUT_NO_INERTIA:
                        v -= chi * V[n, d]
                    elif mutation == MUT_DOUBLE_CONSTRICTION:
                        v *= chi * chi
                V[n, d] = v
                X[n, d] = x + v
                if tracing:
                    code = 0
                    if force:
                        code = FORCED_BIT | (_sign_case(g - x, v) << CASE_SHIFT)
                    if abs(v) + abs(g - X[n, d]) >= delta:
                        code |= PHI_GE_BIT
                    trace[it, n, d] = code
            if dist_tracing and n == 0:
                dist_trace[it] = G[0] - X[0, 0]
            fx = objective_value(fid, X[n])
            if not np.isfinite(fx):
                return NON_FINITE, it, n_local, n_global, n
            if fx <= Lval[n]:
                L[n, :] = X[n, :]
                Lval[n] = fx
                n_local += 1
            if fx <= Gval[0]:
                G[:] = X[n, :]
                Gval[0] = fx
                n_global += 1
    return OK, n_iters, n_local, n_global, -1
