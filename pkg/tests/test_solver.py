import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opinion_ladder import FieldState, Grid1D, ModelParams, build_sequences
from opinion_ladder.frontlab import front_position, trapezoid_mass, vanishing_check
from opinion_ladder.solver import (BumpSpec, CFLViolation, ConfigurationError, SolverConfig,
                                   cfl_dt, initial_state, laplacian, reference_config, run,
                                   step)


def test_cfl_dt_reference_value(unit_params):
    g = Grid1D.from_spacing(150.0, 0.1)
    assert cfl_dt(g, unit_params, 0.4) == pytest.approx(0.002, rel=1e-12)


def test_cfl_dt_quarters_when_spacing_halves(unit_params):
    a = cfl_dt(Grid1D(10.0, 101), unit_params)
    b = cfl_dt(Grid1D(10.0, 201), unit_params)
    assert b == pytest.approx(a / 4, rel=1e-12)


def test_cfl_dt_reaction_limited():
    p = ModelParams.constant(100.0, 1.0, 1.0, 1.0, 3)
    g = Grid1D.from_spacing(10.0, 0.1)
    assert cfl_dt(g, p, 1.0) == pytest.approx(0.1 / 100)


def test_initial_state(unit_params):
    cfg = SolverConfig(Grid1D(20.0, 401), 1.0, 3, [BumpSpec(0, 2, 0.05)] * 3)
    st0 = initial_state(cfg, unit_params)
    assert st0.s0.max() == st0.s0.min() == 2.0
    centre = np.argmin(np.abs(cfg.grid.x))
    assert st0.i[0, centre] == pytest.approx(0.05)
    assert not st0.r.any() and not st0.s.any()
    assert st0.t == 0.0


def test_bump_outside_domain_rejected(unit_params):
    cfg = SolverConfig(Grid1D(5.0, 101), 1.0, 1, [BumpSpec(4.0, 2.0, 0.1)])
    with pytest.raises(ConfigurationError):
        initial_state(cfg, unit_params)


def test_missing_bump_rejected(unit_params):
    cfg = SolverConfig(Grid1D(20.0, 101), 1.0, 3, [BumpSpec()] * 2)
    with pytest.raises(ConfigurationError, match="opinion 3"):
        cfg.validate()


def test_laplacian_of_quadratic():
    g = Grid1D(5.0, 101)
    lap = laplacian(g.x ** 2, g.dx)
    assert np.allclose(lap[1:-1], 2.0)
    assert np.allclose(laplacian(np.full(7, 3.0), 0.5), 0.0)


def _uniform(nx, s0, i, s=None, r=None):
    n = len(i)
    return FieldState(0.0, np.full(nx, s0),
                      np.array([np.full(nx, v) for v in i]),
                      np.zeros((n, nx)) if s is None else np.array([np.full(nx, v) for v in s]),
                      np.zeros((n, nx)) if r is None else np.array([np.full(nx, v) for v in r]))


def test_step_without_infected_only_advances_time(unit_params):
    g = Grid1D(5.0, 51)
    st0 = _uniform(g.nx, 2.0, [0.0, 0.0], s=[0.3, 0.1], r=[0.4, 0.2])
    nxt = step(st0, g, unit_params, 0.001)
    assert nxt.t == pytest.approx(0.001)
    for name in ("s0", "i", "s", "r"):
        assert np.array_equal(getattr(nxt, name), getattr(st0, name))


def test_single_uniform_euler_step():
    p = ModelParams.constant(2.0, 1.0, 1.0, 1.0, 1)
    g = Grid1D(5.0, 11)
    nxt = step(_uniform(g.nx, 2.0, [0.1]), g, p, 0.01)
    assert np.allclose(nxt.s0, 1.998, atol=1e-15)
    assert np.allclose(nxt.i[0], 0.101, atol=1e-15)
    assert np.allclose(nxt.s[0], 0.001, atol=1e-15)
    assert np.allclose(nxt.r[0], 0.001, atol=1e-15)


def test_step_refuses_unstable_dt(unit_params):
    g = Grid1D.from_spacing(5.0, 0.1)
    st0 = _uniform(g.nx, 2.0, [0.01])
    with pytest.raises(CFLViolation):
        step(st0, g, unit_params, 2 * cfl_dt(g, unit_params, 1.0))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(1, 4))
def test_step_conserves_trapezoid_mass(seed, n):
    rng = np.random.default_rng(seed)
    p = ModelParams.from_lists(1.5, list(rng.uniform(0.2, 2, n)), list(rng.uniform(0.5, 2, n)),
                               list(rng.uniform(0.2, 1, n)))
    g = Grid1D(10.0, 81)
    st0 = FieldState(0.0, rng.uniform(0, 1.5, g.nx), rng.uniform(0, 0.3, (n, g.nx)),
                     rng.uniform(0, 0.5, (n, g.nx)), np.zeros((n, g.nx)))
    dt = cfl_dt(g, p, 0.4)
    for scheme in ("euler", "heun"):
        nxt = step(st0, g, p, dt, scheme)
        assert nxt.clamped == 0
        m0, m1 = trapezoid_mass(st0, g), trapezoid_mass(nxt, g)
        assert abs(m1 - m0) <= 1e-10 * m0


def test_run_with_zero_horizon_returns_initial_state(unit_params):
    cfg = reference_config(unit_params, n_sim=2, half_length=30.0, dx=0.2, t_end=0.0)
    res = run(cfg, unit_params)
    assert len(res.snapshots) == 1
    init = initial_state(cfg, unit_params)
    snap = res.snapshots[0]
    assert snap.t == 0.0
    for name in ("s0", "i", "s", "r"):
        assert np.array_equal(getattr(snap, name), getattr(init, name))


def test_run_refuses_small_domain(unit_params):
    cfg = reference_config(unit_params, n_sim=2, half_length=20.0, dx=0.2, t_end=10.0)
    with pytest.raises(ConfigurationError, match="standoff"):
        run(cfg, unit_params)
    res = run(cfg, unit_params, force=True)
    assert res.snapshots[-1].t == pytest.approx(10.0)


def test_run_refuses_unordered_speeds_without_force():
    # opinion 2 diffuses much faster, so c_2 > c_1
    p = ModelParams.from_lists(2.0, [1.0, 50.0, 1.0], 1.0, 1.0)
    seq = build_sequences(p)
    assert seq.speeds[1] > seq.speeds[0]
    cfg = reference_config(p, n_sim=2, half_length=40.0, dx=0.5, t_end=1.0)
    with pytest.raises(ConfigurationError, match="not strictly decreasing"):
        run(cfg, p)
    with pytest.warns(UserWarning):
        run(cfg, p, force=True)


def test_run_snapshot_times_follow_requests(unit_params):
    grid = Grid1D.from_spacing(30.0, 0.2)
    cfg = SolverConfig(grid, 1.0, 2, SolverConfig.default_bumps(unit_params, 2),
                       snapshot_times=(0.0, 0.25, 0.5, 1.0))
    res = run(cfg, unit_params)
    times = [s.t for s in res.snapshots]
    assert len(times) == 4
    for want, got in zip((0.0, 0.25, 0.5, 1.0), times):
        assert want <= got + 1e-12 and got - want < res.dt + 1e-12
    assert len(res.log.records) == 4


def test_front_position_stable_under_refinement(unit_params):
    level = build_sequences(unit_params).plateaus[1] / 2
    pos = {}
    for dx in (0.2, 0.1):
        res = run(reference_config(unit_params, n_sim=2, half_length=40.0, dx=dx, t_end=10.0),
                  unit_params)
        pos[dx] = front_position(res.snapshots[-1].r[0], res.grid, level)
    assert abs(pos[0.2] - pos[0.1]) < 0.1


def test_heun_tracks_s0_law_more_closely(unit_params):
    cfg = reference_config(unit_params, n_sim=2, half_length=30.0, dx=0.2, t_end=3.0)
    euler = run(cfg, unit_params).log.column("s0_identity_residual").max()
    heun_cfg = SolverConfig(cfg.grid, cfg.t_end, cfg.n_sim, cfg.bumps,
                            cfg.cfl_safety, cfg.snapshot_times, "heun")
    heun = run(heun_cfg, unit_params).log.column("s0_identity_residual").max()
    assert heun < euler / 10


# -- the session-wide reference run (L = 150, dx = 0.1, t_end = 60) ---------

def test_reference_run_positivity_and_monotone_accumulators(reference_run):
    snaps = reference_run.snapshots
    for s in snaps:
        assert min(s.s0.min(), s.i.min(), s.s.min(), s.r.min()) >= 0
    for a, b in zip(snaps, snaps[1:]):
        assert (b.r >= a.r).all()
    assert reference_run.log.total_clamped == 0


def test_reference_run_invariant_log(reference_run):
    log = reference_run.log
    assert len(log.records) == len(reference_run.snapshots) == 61
    assert log.column("mass_drift").max() <= 1e-8
    assert log.column("sandwich_violation").max() == 0


def test_reference_run_bump_maxima_near_first_front(reference_run, unit_ladder):
    last = reference_run.snapshots[-1]
    x = reference_run.grid.x
    peak = abs(x[np.argmax(last.i[0])])
    assert peak == pytest.approx(unit_ladder.speeds[0] * last.t, rel=0.10)


def test_reference_run_top_level_vanishes_away_from_origin(reference_run):
    assert vanishing_check(reference_run.snapshots, reference_run.grid, 4, 30.0) <= 1e-3
