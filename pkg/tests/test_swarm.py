import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpso import swarm
from fpso.benchmarks import NAMES, get_objective
from fpso.swarm import CHI, C1, C2, DELTA, Mode, SwarmConfig


class ScriptedDraws:
    """Stands in for the generator: returns queued values in order."""

    def __init__(self, values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)


class CountingDraws:
    def __init__(self, rng):
        self.rng = rng
        self.count = 0

    def random(self):
        self.count += 1
        return self.rng.random()


def state_with(X, V=None, L=None, G=None, mode=Mode.FORCED, objective=None, **cfg):
    X = np.array(X, dtype=float)
    N, D = X.shape
    config = SwarmConfig(N, D, mode=mode, **cfg)
    obj = objective or get_objective("sphere", D)
    st_ = swarm.initialize(config, obj, positions=X)
    if V is not None:
        st_.V[:] = V
    if L is not None:
        st_.L[:] = L
        st_.local_values[:] = [obj(l) for l in st_.L]
    if G is not None:
        st_.G[:] = G
        st_.global_value = obj(st_.G)
    return st_


# ---------------------------------------------------------------- initialize


def test_initialize_velocities_zero_and_local_equals_position():
    cfg = SwarmConfig(3, 2, init_low=0.0, init_high=1.0, rng_seed=11)
    s = swarm.initialize(cfg, get_objective("sphere", 2))
    assert np.all(s.V == 0.0)
    assert np.array_equal(s.L, s.X)
    assert np.all((s.X >= 0) & (s.X < 1))
    assert s.iteration == 0


def test_initialize_global_is_best():
    s = state_with([[1, 1], [2, 2], [0.5, 0.5]])
    assert np.array_equal(s.G, [0.5, 0.5])
    assert s.global_value == 0.5


def test_initialize_ties_pick_first_particle():
    s = state_with([[1, 0], [0, 1], [0, -1]])
    assert np.array_equal(s.G, [1, 0])


def test_initialize_deterministic():
    cfg = SwarmConfig(4, 3, rng_seed=99)
    obj = get_objective("rastrigin", 3)
    assert swarm.initialize(cfg, obj).same_as(swarm.initialize(cfg, obj))
    other = swarm.initialize(cfg.with_(rng_seed=100), obj)
    assert not np.array_equal(other.X, swarm.initialize(cfg, obj).X)


def test_streams_are_independent():
    cfg = SwarmConfig(4, 3, rng_seed=99)
    obj = get_objective("sphere", 3)
    a = swarm.initialize(cfg, obj)
    b = swarm.initialize(cfg.with_(rng_stream=1), obj)
    assert not np.array_equal(a.X, b.X)


def test_initialize_dimension_mismatch():
    with pytest.raises(ValueError):
        swarm.initialize(SwarmConfig(3, 2), get_objective("sphere", 3))


def test_default_box_follows_objective():
    s = swarm.initialize(SwarmConfig(50, 4, rng_seed=1), get_objective("rastrigin", 4))
    assert np.abs(s.X).max() <= 5.12


@pytest.mark.parametrize("kw", [
    dict(chi=0.0), dict(c1=-1.0), dict(c2=0.0), dict(delta=0.0), dict(num_particles=1),
    dict(init_low=1.0, init_high=1.0), dict(rng_seed=-1), dict(rng_seed=2**64),
])
def test_config_validation(kw):
    base = dict(num_particles=3, num_dimensions=2)
    base.update(kw)
    with pytest.raises(ValueError):
        SwarmConfig(**base)


def test_default_parameters():
    cfg = SwarmConfig(5, 15)
    assert (cfg.chi, cfg.c1, cfg.c2, cfg.delta) == (0.72984, 1.49617, 1.49617, 1e-7)
    assert cfg.mode is Mode.FORCED


# ---------------------------------------------------------------- velocity updates


def test_regular_update_zero_when_everything_coincides():
    s = state_with([[2.0], [2.0]])
    s.rng = ScriptedDraws([0.3, 0.8])
    assert swarm.regular_velocity_update(s, 0, 0) == 0.0


def test_regular_update_inertia_only():
    s = state_with([[0.0], [0.0]], V=[[2.0], [0.0]], chi=0.5)
    s.rng = ScriptedDraws([0.9, 0.1])
    assert swarm.regular_velocity_update(s, 0, 0) == 1.0


def test_regular_update_direct_arithmetic():
    # L - X = 1, G - X = -1, r = s = 1
    s = state_with([[0.0], [-1.0]], V=[[1.0], [0.0]], L=[[1.0], [-1.0]], G=[-1.0])
    s.rng = ScriptedDraws([1.0, 1.0])
    v = swarm.regular_velocity_update(s, 0, 0)
    assert v == pytest.approx(CHI * 1 + C1 * 1 - C2 * 1, abs=1e-15)
    assert v == pytest.approx(0.72984, abs=1e-12)


def test_regular_update_draws_r_before_s():
    s = state_with([[0.0], [5.0]], L=[[1.0], [5.0]], G=[5.0])
    s.X[0, 0] = 0.0
    s.rng = ScriptedDraws([0.25, 0.5])
    assert swarm.regular_velocity_update(s, 0, 0) == pytest.approx(C1 * 0.25 * 1 + C2 * 0.5 * 5)


def test_forced_condition_examples():
    s = state_with([[0.0], [0.0], [0.0]])
    assert swarm.forced_condition(s, 0, DELTA)
    s.V[1, 0] = DELTA
    assert not swarm.forced_condition(s, 0, DELTA)
    s = state_with([[0.0], [0.0]], V=[[0.4 * DELTA], [0.9 * DELTA]])
    assert swarm.forced_condition(s, 0, DELTA)


def test_forced_condition_counts_distance_to_global():
    s = state_with([[0.0], [0.6e-7]], V=[[0.0], [0.5e-7]])
    assert not swarm.forced_condition(s, 0, DELTA)


@pytest.mark.parametrize("t, expected", [(0.5, 0.0), (1.0, DELTA), (0.0, -DELTA)])
def test_forced_velocity_endpoints(t, expected):
    assert swarm.forced_velocity_update(ScriptedDraws([t]), DELTA) == expected


def test_forced_velocity_uniform():
    rng = swarm.make_rng(5)
    v = np.array([swarm.forced_velocity_update(rng, DELTA) for _ in range(1_000_000)])
    assert abs(v.mean()) <= 5e-3 * DELTA
    assert v.min() >= -DELTA and v.max() <= DELTA


# ---------------------------------------------------------------- moves


def test_classical_mode_never_forces():
    s = state_with([[0.0, 0.0]] * 3, mode=Mode.CLASSICAL)
    for n in range(3):
        assert swarm.step_particle(s, n, get_objective("sphere", 2)).forced_dimensions == frozenset()


def test_all_dimensions_forced_at_zero_potential():
    s = state_with([[0.0, 0.0, 0.0]] * 3)
    out = swarm.step_particle(s, 0, get_objective("sphere", 3))
    assert out.forced_dimensions == frozenset({0, 1, 2})
    assert np.all(np.abs(s.V[0]) <= DELTA)


def test_equal_value_replaces_attractors():
    s = state_with([[1.0, 1.0], [1.0, 1.0]], mode=Mode.CLASSICAL)
    out = swarm.step_particle(s, 0, get_objective("sphere", 2))
    assert out.local_updated and out.global_updated


def test_global_updates_visible_to_next_particle():
    obj = get_objective("sphere", 1)
    s = state_with([[4.0], [3.0]], mode=Mode.CLASSICAL)
    s.rng = ScriptedDraws([0.0, 0.0, 0.0, 0.0])
    s.V[0, 0] = -4.0 / CHI  # particle 0 jumps to the origin
    swarm.step_particle(s, 0, obj)
    assert s.G[0] == pytest.approx(0.0, abs=1e-15)
    # particle 1's pull now points at the new G
    s.rng = ScriptedDraws([0.0, 1.0])
    swarm.step_particle(s, 1, obj)
    assert s.V[1, 0] == pytest.approx(C2 * (s.G[0] - 3.0))


def test_step_iteration_cardinality_and_monotone():
    obj = get_objective("rastrigin", 4)
    s = swarm.initialize(SwarmConfig(5, 4, rng_seed=3), obj)
    before = s.global_value
    outs = swarm.step_iteration(s, obj)
    assert len(outs) == 5 and [o.particle for o in outs] == list(range(5))
    assert s.iteration == 1
    assert s.global_value <= before


def test_classical_run_improves_sphere():
    obj = get_objective("sphere", 1)
    s = swarm.initialize(SwarmConfig(3, 1, rng_seed=4, mode="classical"), obj)
    start = s.global_value
    swarm.advance(s, obj, 10_000)
    assert s.global_value < start


@pytest.mark.parametrize("name", sorted(NAMES))
def test_draw_budget_per_move(name):
    obj = get_objective(name, 6)
    s = swarm.plant(SwarmConfig(3, 6, rng_seed=8), obj, obj.known_optimum)
    s.X[:, :3] += np.array([1.0, -2.0, 3.0])  # three dimensions stay regular
    counter = CountingDraws(s.rng)
    s.rng = counter
    for it in range(30):
        for n in range(3):
            before = counter.count
            out = swarm.step_particle(s, n, obj)
            k = len(out.forced_dimensions)
            assert counter.count - before == 2 * (6 - k) + k
        s.iteration += 1


# ---------------------------------------------------------------- properties


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**64 - 1), name=st.sampled_from(sorted(NAMES)),
       N=st.integers(2, 5), D=st.integers(2, 5))
def test_monotone_and_attractor_consistency(seed, name, N, D):
    obj = get_objective(name, D)
    s = swarm.initialize(SwarmConfig(N, D, rng_seed=seed), obj)
    best_seen = s.local_values.copy()
    prev = s.global_value
    for _ in range(40):
        for n in range(N):
            out = swarm.step_particle(s, n, obj)
            fx = obj(s.X[n])
            best_seen[n] = min(best_seen[n], fx)
            for d in out.forced_dimensions:
                assert abs(s.V[n, d]) <= s.config.delta
        assert s.global_value <= prev
        prev = s.global_value
        assert np.array_equal(s.local_values, best_seen)
        assert s.global_value == s.local_values.min()
        for n in range(N):
            assert obj(s.L[n]) == s.local_values[n]


def test_mode_equivalence_when_never_forced():
    obj = get_objective("sphere", 3)
    X = [[50.0, -20, 7], [-30, 40, 1], [10, 10, -60], [5, -5, 25]]
    a = state_with(X, objective=obj, rng_seed=21)
    b = state_with(X, objective=obj, rng_seed=21, mode=Mode.CLASSICAL)
    for _ in range(20):
        outs = swarm.step_iteration(a, obj)
        swarm.step_iteration(b, obj)
        assert all(not o.forced_dimensions for o in outs)
    assert np.array_equal(a.X, b.X) and np.array_equal(a.V, b.V)
    assert a.rng.bit_generator.state == b.rng.bit_generator.state


@pytest.mark.parametrize("name", sorted(NAMES))
@pytest.mark.parametrize("planted", [False, True])
def test_kernel_matches_reference_bitwise(name, planted):
    obj = get_objective(name, 4)
    cfg = SwarmConfig(3, 4, rng_seed=31)
    s = swarm.plant(cfg, obj, obj.known_optimum) if planted else swarm.initialize(cfg, obj)
    ref = s.copy()
    counts = np.zeros(4, dtype=np.int64)
    swarm.advance(s, obj, 300, counts=counts)
    forced = np.zeros(4, dtype=np.int64)
    for _ in range(300):
        for out in swarm.step_iteration(ref, obj):
            for d in out.forced_dimensions:
                forced[d] += 1
    assert s.same_as(ref)
    assert np.array_equal(counts, forced)
    assert (s.local_updates, s.global_updates) == (ref.local_updates, ref.global_updates)
    if planted:
        assert counts.sum() > 0


def test_advance_deterministic():
    obj = get_objective("schwefel12", 5)
    cfg = SwarmConfig(4, 5, rng_seed=77)
    a, b = swarm.initialize(cfg, obj), swarm.initialize(cfg, obj)
    swarm.advance(a, obj, 2000)
    swarm.advance(b, obj, 1000)
    swarm.advance(b, obj, 1000)
    assert a.same_as(b)


def test_nonfinite_objective_aborts():
    obj = get_objective("sphere", 2)
    s = state_with([[1e150, 0.0], [1e150, 1.0]], objective=obj, mode=Mode.CLASSICAL)
    s.V[0, 0] = 1e160  # the first move overflows f
    with pytest.raises(swarm.NonFiniteObjective) as err:
        swarm.advance(s, obj, 5)
    assert err.value.particle == 0 and err.value.iteration == 0


def test_nonfinite_objective_aborts_reference_path():
    class Blowup:
        dimension = 1

        def __call__(self, x):
            return np.inf if x[0] > 1.5 else float(x[0] ** 2)

    s = swarm.initialize(SwarmConfig(2, 1, mode="classical"), Blowup(), positions=[[1.0], [0.5]])
    s.V[0, 0] = 10.0
    with pytest.raises(swarm.NonFiniteObjective) as err:
        swarm.step_particle(s, 0, Blowup())
    assert err.value.particle == 0


def test_particle_view_is_a_copy():
    s = state_with([[1.0, 2.0], [3.0, 4.0]])
    p = s.particle(1)
    p.position[0] = 99.0
    assert s.X[1, 0] == 3.0
    assert len(s.particles) == 2
