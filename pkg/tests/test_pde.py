"""Evolution machinery: kernel series, line evolution, wave and heat flows."""

import math

import numpy as np
import pytest
from scipy.special import j1

from harmonic.density import make_euclidean, make_real_hyperbolic
from harmonic.grids import make_grid
from harmonic.pde import (BoundaryLeakError, KGKernel, heat_identity_check,
                          intertwine_check, kg_energy, kg_kernel,
                          kg_kernel_dt, kg_solve, radial_heat_solve,
                          radial_wave_solve, support_growth_slope)
from harmonic.profiles import gauss_bump, smooth_bump
from harmonic.transforms import EvenLineFunction, RadialFunction

E0 = make_euclidean(0)
E2 = make_euclidean(2)
H3 = make_real_hyperbolic(2)


def _gauss_line(w):
    S = 7.5 * w
    g = make_grid(S, spacing=0.02)
    return EvenLineFunction(grid=g, values=np.exp(-g.points**2 / (2 * w * w)),
                            support=S,
                            exact_node_values=np.exp(-g.nodes**2 / (2 * w * w)))


# -- smoothing kernel ---------------------------------------------------------

def test_kernel_light_cone_value_is_exact():
    # on the cone u = t^2 - s^2 = 0 and the series collapses to one term
    for H, t in [(0.7, 1.0), (2.0, 3.0), (3.5, 10.0)]:
        assert kg_kernel(H, t, t) == -(H * H) * t / 16.0


def test_kernel_matches_bessel_closed_form():
    H, t = 3.0, 2.0
    s = np.linspace(0.0, 1.9, 12)
    u = t * t - s * s
    exact = -t * (H / 4.0) * j1(H * np.sqrt(u) / 2.0) / np.sqrt(u)
    assert np.max(np.abs(kg_kernel(H, t, s) - exact)) < 1e-14


def test_kernel_is_even_in_s():
    s = np.array([0.2, 0.9, 1.4])
    assert np.array_equal(kg_kernel(2.0, 1.5, s), kg_kernel(2.0, 1.5, -s))


def test_kernel_vanishes_for_flat_space():
    assert np.array_equal(kg_kernel(0.0, 2.0, np.array([0.0, 1.0])), [0.0, 0.0])


def test_kernel_domain_guards():
    with pytest.raises(ValueError, match="nonnegative"):
        kg_kernel(-1.0, 1.0, 0.0)
    with pytest.raises(ValueError, match="nonnegative"):
        kg_kernel(1.0, -1.0, 0.0)
    with pytest.raises(ValueError, match=r"\|s\| <= t"):
        kg_kernel(1.0, 1.0, 1.5)
    with pytest.raises(ValueError, match="exceeds the supported range"):
        kg_kernel(5.0, 9.0, 0.0)


def test_kernel_time_derivative_matches_finite_differences():
    H, t, h = 3.0, 2.0, 1e-5
    s = np.linspace(0.0, 1.8, 10)
    fd = (kg_kernel(H, t + h, s) - kg_kernel(H, t - h, s)) / (2 * h)
    assert np.max(np.abs(kg_kernel_dt(H, t, s) - fd)) < 1e-9


def test_kernel_evaluator_object():
    ker = KGKernel(H=2.0)
    assert ker(1.5, 0.5) == kg_kernel(2.0, 1.5, 0.5)
    assert ker.dt(1.5, 0.5) == kg_kernel_dt(2.0, 1.5, 0.5)


# -- line evolution -----------------------------------------------------------

def test_flat_line_evolution_is_dalembert():
    w, t = 0.5, 1.5
    g = _gauss_line(w)
    v = kg_solve(0.0, g, t)
    pts = v.grid.points

    def gf(x):
        return np.exp(-x**2 / (2 * w * w)) * (np.abs(x) <= g.support)

    exact = 0.5 * (gf(pts - t) + gf(pts + t))
    assert np.max(np.abs(v.values - exact)) < 1e-7
    assert v.support == pytest.approx(g.support + t)


def test_flat_line_energy_value():
    # conserved energy of the d'Alembert solution equals int (g')^2 = sqrt(pi)
    # for the unit-height Gaussian of width 0.5
    v = kg_solve(0.0, _gauss_line(0.5), 1.5)
    assert kg_energy(v) == pytest.approx(math.sqrt(math.pi), abs=1e-6)


def test_kg_solve_domain_cap():
    with pytest.raises(ValueError, match="exceeds the supported range"):
        kg_solve(5.0, _gauss_line(0.5), 9.0)


# -- radial wave flow ---------------------------------------------------------

def test_wave_flat_line_matches_dalembert():
    states = radial_wave_solve(E0, gauss_bump(0.5), 2.0, 0.004)
    st = states[-1]
    f = gauss_bump(0.5).f
    r = st.grid.points
    exact = 0.5 * (f(np.abs(r - 2.0)) + f(r + 2.0))
    assert st.t == pytest.approx(2.0)
    assert np.max(np.abs(st.u - exact)) < 2e-4


def test_wave_states_are_ordered_samples():
    states = radial_wave_solve(E2, gauss_bump(0.5), 1.0, 0.004, n_samples=5)
    ts = [st.t for st in states]
    assert len(states) == 5
    assert ts[0] == 0.0
    assert all(b > a for a, b in zip(ts, ts[1:]))
    # initial slice is the datum with zero velocity
    assert np.array_equal(states[0].u_t, np.zeros_like(states[0].u))
    assert np.max(np.abs(states[0].u - gauss_bump(0.5).f(states[0].grid.points))) < 1e-12


def test_wave_support_grows_at_unit_speed():
    states = radial_wave_solve(H3, smooth_bump(1.0), 4.0, 0.004)
    slope = support_growth_slope(states)
    assert 0.95 <= slope <= 1.05
    supports = [st.support for st in states]
    assert all(b >= a - 1e-9 for a, b in zip(supports, supports[1:]))


def test_wave_guards():
    with pytest.raises(ValueError, match="CFL"):
        radial_wave_solve(E2, gauss_bump(0.5), 1.0, dt=0.1, dr=0.1)
    with pytest.raises(ValueError, match="light cone reaches the wall"):
        radial_wave_solve(E2, gauss_bump(0.5), 5.0, 0.004, r_max=4.0)
    with pytest.raises(ValueError, match="dt > 0"):
        radial_wave_solve(E2, gauss_bump(0.5), 1.0, dt=-0.01)
    with pytest.raises(TypeError, match="RadialFunction or RadialProfile"):
        radial_wave_solve(E2, np.cos, 1.0, 0.004)


def test_support_slope_needs_samples():
    states = radial_wave_solve(E2, gauss_bump(0.5), 0.3, 0.004, n_samples=3)
    with pytest.raises(ValueError, match="not enough samples"):
        support_growth_slope(states, t_min=2.0)


# -- intertwining -------------------------------------------------------------

def test_intertwine_residual_small():
    assert intertwine_check(E2, smooth_bump(1.0)) < 1e-5


def test_intertwine_requires_profile():
    f = RadialFunction.from_profile(E2, gauss_bump(0.4))
    with pytest.raises(TypeError, match="RadialProfile"):
        intertwine_check(E2, f)


# -- radial heat flow ---------------------------------------------------------

def test_heat_conserves_unit_mass():
    states = radial_heat_solve(H3, 0.5, 0.3)
    assert states[0].mass == pytest.approx(1.0, abs=1e-12)
    for st in states:
        assert st.mass == pytest.approx(1.0, abs=1e-10)
    assert states[-1].t == pytest.approx(0.5, abs=0.01)


def test_heat_stays_nonnegative_and_spreads():
    states = radial_heat_solve(E2, 1.0, 0.3)
    k0, k1 = states[0], states[-1]
    assert np.all(k1.k >= -1e-12)
    # peak decays as mass spreads outward
    assert np.max(k1.k) < 0.5 * np.max(k0.k)


def test_heat_guards():
    with pytest.raises(ValueError, match=r"\(0, 5\]"):
        radial_heat_solve(E2, 6.0, 0.3)
    with pytest.raises(ValueError, match="3 dr"):
        radial_heat_solve(E2, 0.5, 0.02, dr=0.01)


def test_heat_leak_error_reports_needed_domain():
    with pytest.raises(BoundaryLeakError) as exc:
        radial_heat_solve(E2, 1.0, 0.3, r_max=2.0)
    assert exc.value.required_r_max > 2.0


def test_heat_multiplier_flat_space():
    gap = heat_identity_check(E2, 0.5, np.linspace(0.0, 2.0, 5))
    assert gap < 1e-3


def test_heat_multiplier_guard_underflow():
    with pytest.raises(ValueError, match="shrink"):
        heat_identity_check(E2, 0.5, np.array([0.0, 60.0]))
