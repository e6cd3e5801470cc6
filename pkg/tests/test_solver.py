import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cdasym.core import (
    Field,
    Frame,
    Grid1D,
    InitialData,
    Nonlinearity,
    RunConfig,
    Scheme,
    lp_norm,
    make_initial,
    trapezoid_integral,
)
from cdasym.errors import DomainTooSmall, InvalidConfig, StepRejected
from cdasym.exact import burgers_profile, heat_kernel
from cdasym.scenarios import burgers_error, heat_oracle, similarity_profile, similarity_run
from cdasym.solver import (
    Tridiagonal,
    contraction_pair,
    is_non_increasing,
    is_strictly_decreasing_windows,
    new_state,
    run,
    step,
)


def test_tridiagonal_matches_dense():
    rng = np.random.default_rng(0)
    n = 12
    lo, up = rng.normal(size=n - 1), rng.normal(size=n - 1)
    diag = 4.0 + rng.random(n)
    rhs = rng.normal(size=n)
    A = np.diag(diag) + np.diag(lo, -1) + np.diag(up, 1)
    np.testing.assert_allclose(Tridiagonal(lo, diag, up).solve(rhs), np.linalg.solve(A, rhs))


class TestHeat:
    def test_matches_kernel(self):
        assert heat_oracle(4001, 0.01) < 1e-5

    def test_second_order(self):
        coarse = heat_oracle(1001, 0.04)
        fine = heat_oracle(2001, 0.02)
        assert coarse / fine == pytest.approx(4.0, rel=0.1)

    def test_masses_conserved(self):
        g = Grid1D.symmetric(20.0, 801)
        cfg = RunConfig(g, Nonlinearity.none(), InitialData.gaussian(), t_end=1.0, dt=0.01,
                        cadence=10)
        tr = run(cfg)
        assert tr.max_mass_drift() < 1e-8
        assert tr.times[-1] == pytest.approx(1.0)
        assert is_non_increasing(tr.series("linf"))


class TestBurgers:
    def test_against_hopf_cole(self):
        err, _ = burgers_error(2048, 0.002, 1.0)
        assert err < 1e-4

    def test_larger_mass(self):
        err, _ = burgers_error(2048, 0.002, 1.0, mass=2.0)
        assert err < 1e-4


class TestSimilarityFrame:
    def test_heat_steady_state(self):
        g = Grid1D.symmetric(15.0, 3001)
        v0 = make_initial(InitialData.box(1.0, 2.0), g, frame=Frame.SIMILARITY)
        tr = similarity_run(v0, Nonlinearity.none(), 0.01, 20.0)
        v = tr.snapshots[-1].field.values
        ref = np.exp(-0.25 * g.x**2) / math.sqrt(4 * math.pi)
        assert np.sum(np.abs(v - ref)) * g.dx < 1e-5

    def test_burgers_steady_state(self):
        v = similarity_profile(1.0)
        ref = burgers_profile(1.0, v.grid.x)
        assert lp_norm(v.with_values(v.values - ref), 1) < 1e-4

    def test_rejects_other_flux(self):
        g = Grid1D.symmetric(10.0, 201)
        v0 = make_initial(InitialData.gaussian(), g, frame=Frame.SIMILARITY)
        with pytest.raises(InvalidConfig):
            step(new_state(v0, 0.01, Nonlinearity.power_law(3.0)))


class TestGuards:
    def test_convective_cfl(self):
        g = Grid1D.symmetric(10.0, 201)
        u0 = make_initial(InitialData.gaussian(50.0, 0.5), g)
        state = new_state(u0, 0.5, Nonlinearity.power_law(2.0))
        with pytest.raises(StepRejected) as info:
            step(state)
        assert 0 < info.value.suggested_dt < 0.5

    def test_explicit_diffusion_limit(self):
        g = Grid1D.symmetric(10.0, 201)
        u0 = make_initial(InitialData.gaussian(), g)
        state = new_state(u0, 0.01, Nonlinearity.none(), Scheme.UPWIND_EXPLICIT)
        with pytest.raises(StepRejected) as info:
            step(state)
        assert info.value.suggested_dt == pytest.approx(0.2 * g.dx**2)

    def test_boundary_without_growth(self):
        g = Grid1D.symmetric(5.0, 201)
        cfg = RunConfig(g, Nonlinearity.none(), InitialData.gaussian(), t_end=10.0, dt=0.01,
                        cadence=100)
        with pytest.raises(DomainTooSmall):
            run(cfg)

    def test_growth_conserves_mass(self):
        g = Grid1D.symmetric(8.0, 201)
        cfg = RunConfig(g, Nonlinearity.power_law(2.0), InitialData.gaussian(), t_end=10.0,
                        dt=0.01, cadence=100, grow_domain=True)
        tr = run(cfg)
        assert tr.restarts >= 1
        assert tr.max_mass_drift() < 1e-8
        assert tr.snapshots[-1].field.grid.length > g.length


class TestRegrid:
    def test_injection_for_compatible_n(self):
        g = Grid1D.symmetric(10.0, 401)
        u0 = make_initial(InitialData.gaussian(), g)
        state = new_state(u0, 0.01, Nonlinearity.none())
        before = state.field.values.copy()
        state.regrid(2)
        np.testing.assert_allclose(state.field.values[100:301], before[::2], atol=1e-15)
        assert state.dt == pytest.approx(0.04)
        assert state.mass == pytest.approx(1.0, abs=1e-8)


def test_snapshot_times_are_hit_exactly():
    g = Grid1D.symmetric(20.0, 401)
    times = (0.013, 0.5, 1.0)
    cfg = RunConfig(g, Nonlinearity.power_law(2.0), InitialData.gaussian(), t_end=1.0, dt=0.01,
                    snapshot_times=times)
    tr = run(cfg)
    np.testing.assert_allclose(tr.times, (0.0,) + times, rtol=0, atol=1e-12)


class TestContraction:
    def _cfg(self, q=2.0):
        g = Grid1D.symmetric(20.0, 401)
        dt = 0.2 * g.dx**2
        return RunConfig(g, Nonlinearity.power_law(q), InitialData.gaussian(), t_end=200 * dt,
                         dt=dt, scheme=Scheme.UPWIND_EXPLICIT, snapshot_times=(200 * dt,))

    def test_identical_data(self):
        cfg = self._cfg()
        u0 = make_initial(InitialData.gaussian(), cfg.grid)
        dists = [d for _, d in contraction_pair(cfg, u0, u0)]
        assert max(dists) <= 1e-12

    def test_ordered_pair_distance_is_mass_gap(self):
        cfg = self._cfg()
        u0 = make_initial(InitialData.gaussian(2.0), cfg.grid)
        v0 = make_initial(InitialData.gaussian(1.0), cfg.grid)
        dists = np.array([d for _, d in contraction_pair(cfg, u0, v0)])
        np.testing.assert_allclose(dists, 1.0, atol=1e-9)

    def test_distance_shrinks(self):
        cfg = self._cfg()
        u0 = make_initial(InitialData.gaussian(1.0, 1.0), cfg.grid)
        v0 = make_initial(InitialData.box(1.0, 2.0), cfg.grid)
        dists = [d for _, d in contraction_pair(cfg, u0, v0)]
        assert is_non_increasing(dists, slack=0.0)
        assert is_strictly_decreasing_windows(dists)


@settings(max_examples=15, deadline=None)
@given(
    q=st.sampled_from([1.5, 2.0, 3.0]),
    m1=st.floats(-2.0, 2.0),
    m2=st.floats(-2.0, 2.0),
    c=st.floats(-3.0, 3.0),
)
def test_mass_conserved_for_random_data(q, m1, m2, c):
    g = Grid1D.symmetric(20.0, 401)
    u = make_initial(InitialData.gaussian(1.0, 1.0, c), g).values * m1
    u += make_initial(InitialData.box(1.0, 2.0), g).values * m2
    u0 = Field(g, u)
    state = new_state(u0, 0.005, Nonlinearity.power_law(q))
    for _ in range(100):
        step(state)
    assert trapezoid_integral(state.field) == pytest.approx(m1 + m2, abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(m=st.floats(0.1, 5.0), w=st.floats(0.3, 2.0), q=st.sampled_from([1.5, 2.0, 3.0]))
def test_upwind_preserves_sign(m, w, q):
    g = Grid1D.symmetric(15.0, 301)
    u0 = make_initial(InitialData.gaussian(m, w), g)
    nl = Nonlinearity.power_law(q)
    smax = float(np.max(nl.speed(u0.values)))
    dt = min(0.2 * g.dx**2, 0.9 / (2 / g.dx**2 + smax / g.dx))
    state = new_state(u0, dt, nl, Scheme.UPWIND_EXPLICIT)
    for _ in range(200):
        step(state)
    assert state.field.values.min() >= 0.0


def test_heat_kernel_is_fixed_profile_shape():
    # sanity for the oracle used above: G(., t+1/2) has unit mass
    x = np.linspace(-30, 30, 6001)
    assert np.trapezoid(heat_kernel(x, 1.5), x) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=15, deadline=None)
@given(m=st.floats(0.1, 3.0), w=st.floats(0.3, 2.0), q=st.sampled_from([1.5, 2.0, 3.0]),
       box=st.booleans())
def test_imex_keeps_nonnegative_data_nonnegative(m, w, q, box):
    g = Grid1D.symmetric(30.0, 1201)
    gen = InitialData.box(m, 2 * w) if box else InitialData.gaussian(m, w)
    u0 = make_initial(gen, g)
    nl = Nonlinearity.power_law(q)
    smax = float(np.max(nl.speed(u0.values)))
    state = new_state(u0, min(0.01, 0.4 * g.dx / smax), nl)
    for _ in range(100):
        step(state)
        assert state.field.values.min() >= -1e-12
