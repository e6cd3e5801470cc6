import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import erf

from cdasym.core import Field, Grid1D, InitialData, lp_norm, make_initial, trapezoid_integral
from cdasym.errors import InvalidExponent, NonPositiveTime
from cdasym.exact import (
    BurgersProfile,
    NWave,
    burgers_exact,
    burgers_profile,
    heat_kernel,
    heat_kernel_field,
    heat_solution,
    hopf_cole_forward,
    linear_convection_solution,
)


@pytest.fixture
def grid():
    return Grid1D.symmetric(30.0, 3001)


class TestHeatKernel:
    def test_values(self):
        assert heat_kernel(0.0, 1.0) == pytest.approx(0.2820948, abs=1e-7)
        assert heat_kernel(2.0, 1.0) == pytest.approx(0.1037769, abs=1e-7)

    def test_symmetric(self):
        x = np.linspace(0, 5, 11)
        np.testing.assert_array_equal(heat_kernel(x, 0.7), heat_kernel(-x, 0.7))

    @pytest.mark.parametrize("t", [0.0, -1.0])
    def test_nonpositive_time(self, t):
        with pytest.raises(NonPositiveTime):
            heat_kernel(0.0, t)


class TestHeatSolution:
    def test_semigroup(self, grid):
        out = heat_solution(heat_kernel_field(grid, 1.0), 1.0)
        assert np.max(np.abs(out.values - heat_kernel(grid.x, 2.0))) < 1e-8

    def test_zero_data(self, grid):
        zero = Field(grid, np.zeros(grid.n))
        assert np.all(heat_solution(zero, 3.0).values == 0.0)

    def test_box_against_erf(self):
        # erf oracle for box data, independent of the quadrature
        g = Grid1D.symmetric(20.0, 4001)
        u0 = make_initial(InitialData.box(1.0, 2.0), g)
        t = 0.5
        ref = 0.25 * (erf((g.x + 1) / (2 * math.sqrt(t))) - erf((g.x - 1) / (2 * math.sqrt(t))))
        assert np.max(np.abs(heat_solution(u0, t).values - ref)) < 1e-4


class TestLinearConvection:
    def test_a_zero_is_heat(self, grid):
        u0 = make_initial(InitialData.gaussian(), grid)
        np.testing.assert_array_equal(
            linear_convection_solution(u0, 0.0, 1.0).values, heat_solution(u0, 1.0).values
        )

    def test_shifted_kernel(self, grid):
        out = linear_convection_solution(heat_kernel_field(grid, 1.0), 1.0, 1.0)
        assert np.max(np.abs(out.values - heat_kernel(grid.x + 1.0, 2.0))) < 1e-8

    def test_mass_preserved(self, grid):
        u0 = make_initial(InitialData.gaussian(2.0, 0.7), grid)
        out = linear_convection_solution(u0, -2.5, 2.0)
        assert trapezoid_integral(out) == pytest.approx(2.0, abs=1e-8)


class TestHopfCole:
    def test_zero_data(self, grid):
        w = hopf_cole_forward(Field(grid, np.zeros(grid.n)))
        np.testing.assert_array_equal(w.values, 1.0)

    @pytest.mark.parametrize("gen", [InitialData.gaussian(1.5), InitialData.dipole(),
                                     InitialData.mixed(-0.5)])
    def test_bounds_and_limits(self, grid, gen):
        u0 = make_initial(gen, grid)
        L = lp_norm(u0, 1)
        M = trapezoid_integral(u0)
        w = hopf_cole_forward(u0).values
        assert np.all(w >= math.exp(-L) - 1e-14) and np.all(w <= math.exp(L) + 1e-14)
        assert w[0] == pytest.approx(1.0, abs=1e-8)
        assert w[-1] == pytest.approx(math.exp(M), abs=1e-8)


class TestBurgersExact:
    def test_zero_stays_zero(self, grid):
        out = burgers_exact(Field(grid, np.zeros(grid.n)), 1.0)
        assert np.max(np.abs(out.values)) == 0.0

    @pytest.mark.parametrize("M", [-1.0, 0.5, 2.0])
    def test_self_similar_solution(self, M):
        # u_M(., 1) evolves to u_M(., 1 + t)
        g = Grid1D.symmetric(30.0, 6001)
        prof = BurgersProfile(M)
        u1 = Field(g, prof.at(g.x, 1.0), 0.0)
        out = burgers_exact(u1, 2.0)
        assert np.max(np.abs(out.values - prof.at(g.x, 3.0))) < 1e-6

    def test_mass_conserved(self, grid):
        u0 = make_initial(InitialData.gaussian(1.3), grid)
        assert trapezoid_integral(burgers_exact(u0, 4.0)) == pytest.approx(1.3, abs=1e-6)


class TestBurgersProfile:
    def test_zero_mass(self):
        x = np.linspace(-5, 5, 21)
        np.testing.assert_array_equal(burgers_profile(0.0, x), 0.0)

    def test_value_at_origin(self):
        e1 = math.e - 1
        expected = e1 / math.sqrt(4 * math.pi) / (e1 / 2 + 1)
        assert burgers_profile(1.0, 0.0) == pytest.approx(expected, abs=1e-12)
        assert burgers_profile(1.0, 0.0) == pytest.approx(0.26072, abs=1e-4)

    @pytest.mark.parametrize("M", [-1.0, 0.5, 3.0])
    def test_mass(self, M):
        val, _ = quad(lambda x: burgers_profile(M, x), -60, 60, limit=200)
        assert val == pytest.approx(M, abs=1e-8)

    def test_ode_residual(self):
        # f'' + (y f)'/2 + (f^2)' = 0 integrates once to f' + y f/2 + f^2 = 0
        y = np.linspace(-10, 10, 2001)
        h = y[1] - y[0]
        f = burgers_profile(2.0, y)
        res = np.gradient(f, h, edge_order=2) + 0.5 * y * f + f * f
        assert np.max(np.abs(res)) < 1e-5

    def test_general_a(self):
        y = np.linspace(-6, 6, 13)
        np.testing.assert_allclose(burgers_profile(1.0, y, a=2.0), burgers_profile(2.0, y) / 2.0)


@settings(max_examples=20, deadline=None)
@given(m1=st.floats(-3.0, 3.0), m2=st.floats(-3.0, 3.0))
def test_profile_is_monotone_in_mass(m1, m2):
    lo, hi = sorted((m1, m2))
    y = np.linspace(-8, 8, 81)
    assert np.all(burgers_profile(lo, y) <= burgers_profile(hi, y) + 1e-15)


class TestNWave:
    def test_constants(self):
        w = NWave(1.5, 1.0)
        assert w.c == pytest.approx(3 ** (1 / 3), rel=1e-12)
        assert w.r(1.0) == pytest.approx(1.44225, abs=1e-5)

    @pytest.mark.parametrize("t", [1.0, 10.0])
    @pytest.mark.parametrize("a", [None, -1.0, 1.0])
    def test_mass(self, t, a):
        w = NWave(1.5, 2.0, a)
        r = w.r(t)
        lo, hi = (-r, 0.0) if a == 1.0 else (0.0, r)
        val, _ = quad(lambda x: w(x, t), lo, hi)
        assert val == pytest.approx(2.0, rel=1e-8)

    def test_sup_is_value_at_front(self):
        w = NWave(1.5, 3.0, -0.7)
        r = w.r(2.0)
        assert w(r * (1 - 1e-12), 2.0) == pytest.approx(w.sup(2.0), rel=1e-9)

    @pytest.mark.parametrize("q", [1.0, 2.0, 3.0])
    def test_exponent_range(self, q):
        with pytest.raises(InvalidExponent):
            NWave(q, 1.0)
