"""Radial eigenfunction machinery: series/ODE agreement, closed-form oracles,
coefficient bounds, truncation control, derivative checks."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from harmonic.density import (make_custom, make_damek_ricci, make_euclidean,
                              make_real_hyperbolic)
from harmonic.grids import make_grid
from harmonic.spherical import (QuadratureError, TruncationError, capital_phi,
                                default_radial_grid, eigen_state_at, phi,
                                phi_basis, phi_lambda_derivative,
                                phi_ode_values, phi_series, spectral_shift,
                                truncation_order, volterra_coefficients)

E0 = make_euclidean(0)
E2 = make_euclidean(2)
H3 = make_real_hyperbolic(2)
GRID = make_grid(6.0, spacing=0.05)


# -- Volterra coefficients -------------------------------------------------

def test_first_coefficient_closed_form():
    # theta = r^n gives a_1(r) = r^2 / (2(n+1)); for n=2 that is r^2/6.
    coeffs = volterra_coefficients(E2, GRID, 1)
    r = GRID.points
    assert np.max(np.abs(coeffs.point_values[0] - r**2 / 6.0)) < 1e-13
    assert np.max(np.abs(coeffs.point_derivs[0] - r / 3.0)) < 1e-12


def test_flat_line_coefficients_are_factorial_powers():
    # theta = 1: the recursion solves a_k = r^{2k}/(2k)! exactly.
    coeffs = volterra_coefficients(E0, GRID, 6)
    r = GRID.points
    for k in range(1, 7):
        exact = r ** (2 * k) / math.factorial(2 * k)
        scale = exact[-1]
        err = np.max(np.abs(coeffs.point_values[k - 1] - exact)) / scale
        assert err < 1e-12, f"k={k}: {err}"


def test_coefficients_nonnegative_and_bounded():
    coeffs = volterra_coefficients(H3, GRID, 8)
    r = GRID.points[1:]
    for k in range(1, 9):
        a = coeffs.point_values[k - 1][1:]
        cap = r ** (2 * k) / math.factorial(2 * k)
        assert np.all(a >= -1e-15 * cap[-1])
        assert np.all(a <= cap * (1 + 1e-12) + 1e-15 * cap[-1])


def test_workspace_extends_consistently():
    # Asking for more terms must not perturb the ones already computed.
    g = make_grid(4.0, n_panels=64)
    first = volterra_coefficients(H3, g, 3).point_values.copy()
    more = volterra_coefficients(H3, g, 10)
    assert more.k_max == 10
    assert np.array_equal(more.point_values[:3], first)


def test_coefficient_guards():
    with pytest.raises(ValueError):
        volterra_coefficients(E2, GRID, 0)
    # density that goes negative inside the grid: the quadrature must refuse
    bad = make_custom("r**2*(1 - r**2/4)", 2, validate=False)
    with pytest.raises(QuadratureError, match="positive"):
        volterra_coefficients(bad, make_grid(3.0, n_panels=30), 2)


# -- truncation control ----------------------------------------------------

def test_truncation_order_basics():
    assert truncation_order(0.0, 10.0) == 0
    k_small = truncation_order(1.0, 5.0)
    k_large = truncation_order(9.0, 5.0)
    assert 0 < k_small < k_large
    # the returned order really does make the bound term tiny
    b = k_small * math.log(1.0 * 25.0) - math.lgamma(2 * k_small + 1)
    assert b < math.log(1e-14)


def test_truncation_order_cap():
    with pytest.raises(TruncationError) as exc:
        truncation_order(1e4, 10.0, k_cap=160)
    assert exc.value.required_k > 160


# -- phi against closed forms ----------------------------------------------

def _phi_errors(model, lam, oracle, builder):
    sf = builder(model, lam, GRID)
    r = GRID.points
    return np.max(np.abs(sf.values - oracle(r))), sf


def test_phi_series_flat_line_is_cosine():
    err, sf = _phi_errors(E0, 1.7, lambda r: np.cos(1.7 * r), phi_series)
    assert err < 1e-11
    assert err <= sf.error_bound + 1e-11


def test_phi_series_flat_space_is_sinc():
    lam = 2.0
    def oracle(r):
        out = np.ones_like(r)
        out[1:] = np.sin(lam * r[1:]) / (lam * r[1:])
        return out
    err, _ = _phi_errors(E2, lam, oracle, phi_series)
    assert err < 1e-11


def test_phi_hyperbolic_oracle_both_paths():
    lam = 1.3
    def oracle(r):
        out = np.ones_like(r)
        out[1:] = np.sin(lam * r[1:]) / (lam * np.sinh(r[1:]))
        return out
    err_s, _ = _phi_errors(H3, lam, oracle, phi_series)
    err_o, _ = _phi_errors(H3, lam, oracle,
                           lambda m, l, g: phi(m, l, g, method="ode"))
    assert err_s < 1e-11
    assert err_o < 1e-9


def test_phi_complex_lambda():
    lam = 1.0 + 0.5j
    sf = phi(E0, lam, GRID)
    err = np.max(np.abs(sf.values - np.cos(lam * GRID.points)))
    assert err < 1e-10


def test_phi_is_one_at_special_imaginary_lambda():
    # L(iH/2) = 0 kills every series term.
    for model in (H3, make_damek_ricci(2, 1)):
        lam = 0.5j * model.H
        L, _ = spectral_shift(model, lam)
        assert abs(L) < 1e-14
        sf = phi(model, lam, GRID)
        assert np.max(np.abs(sf.values - 1.0)) < 1e-10


def test_phi_method_dispatch():
    assert phi(E2, 1.0, GRID).method == "series"
    assert phi(E2, 80.0, GRID).method == "ode"  # cancellation floor too high
    with pytest.raises(ValueError, match="unknown method"):
        phi(E2, 1.0, GRID, method="newton")


def test_spherical_function_spline_call():
    sf = phi_series(E0, 1.1, GRID)
    r = np.array([0.513, 2.044, 5.391])
    # stored samples are 1e-14 accurate; the spline between them is O(h^4)
    assert np.max(np.abs(sf(r) - np.cos(1.1 * r))) < 1e-7


def test_phi_ode_values_batch_matches_single():
    r_pts = np.linspace(0.0, 5.0, 41)
    lams = [0.5, 1.0, 2.0]
    batch, dbatch = phi_ode_values(E2, lams, r_pts)
    for i, lam in enumerate(lams):
        single, dsingle = phi_ode_values(E2, [lam], r_pts)
        assert np.allclose(batch[i], single[0], atol=1e-12)
        assert np.allclose(dbatch[i], dsingle[0], atol=1e-12)


def test_phi_ode_values_requires_sorted_points():
    with pytest.raises(ValueError, match="sorted"):
        phi_ode_values(E2, [1.0], np.array([1.0, 0.5, 2.0]))


# -- lambda derivatives ----------------------------------------------------

def test_lambda_derivative_matches_finite_differences():
    lam, h = 1.2, 1e-5
    d1 = phi_lambda_derivative(E2, lam, 1, GRID)
    up = phi_series(E2, lam + h, GRID).values
    dn = phi_series(E2, lam - h, GRID).values
    assert np.max(np.abs(d1 - (up - dn) / (2 * h))) < 1e-7


def test_second_lambda_derivative_matches_finite_differences():
    lam, h = 1.2, 1e-4
    d2 = phi_lambda_derivative(H3, lam, 2, GRID)
    mid = phi_series(H3, lam, GRID).values
    up = phi_series(H3, lam + h, GRID).values
    dn = phi_series(H3, lam - h, GRID).values
    assert np.max(np.abs(d2 - (up - 2 * mid + dn) / h**2)) < 1e-5


def test_lambda_derivative_guards():
    with pytest.raises(ValueError):
        phi_lambda_derivative(E2, 1.0, 0, GRID)
    with pytest.raises(ValueError):
        phi_lambda_derivative(E2, 1.0, 5, GRID)


# -- integrated eigenfunction ----------------------------------------------

def test_capital_phi_flat_line():
    lam = 1.4
    vals = capital_phi(E0, lam, GRID)
    assert np.max(np.abs(vals - np.sin(lam * GRID.points) / lam)) < 1e-12


def test_capital_phi_recovers_ball_volume():
    # lambda = iH/2 makes phi constant 1, so Phi = integral of theta.
    vals = capital_phi(H3, 1j, GRID)
    r = GRID.points
    exact = (np.sinh(r) * np.cosh(r) - r) / 2.0
    assert np.max(np.abs(vals - exact)) < 1e-12 * exact[-1]


# -- batched L-plane state (zero-search backend) -----------------------------

def test_eigen_state_flat_line_closed_forms():
    lam = 1.5
    L = -lam * lam
    out = eigen_state_at(E0, [L], 2.0)
    r = 2.0
    assert abs(out["phi"][0] - math.cos(lam * r)) < 1e-10
    assert abs(out["dphi_dr"][0] + lam * math.sin(lam * r)) < 1e-10
    assert abs(out["Phi"][0] - math.sin(lam * r) / lam) < 1e-10
    # d phi/dL = r sin(lam r) / (2 lam) by the chain rule through lam^2 = -L
    assert abs(out["dphi_dL"][0] - r * math.sin(lam * r) / (2 * lam)) < 1e-9
    dPhi = (r * math.cos(lam * r) - math.sin(lam * r) / lam) / lam
    assert abs(out["dPhi_dL"][0] - dPhi / (-2 * lam)) < 1e-9


def test_eigen_state_requires_positive_radius():
    with pytest.raises(ValueError):
        eigen_state_at(E0, [-1.0], 0.0)


# -- basis cache -------------------------------------------------------------

def test_phi_basis_values_and_shape():
    r_pts = np.linspace(0.0, 4.0, 17)
    lams = np.array([0.6, 1.9])
    mat = phi_basis(E0, lams, r_pts)
    assert mat.shape == (2, 17)
    assert np.max(np.abs(mat - np.cos(lams[:, None] * r_pts[None, :]))) < 1e-9
    assert phi_basis(E0, lams, r_pts) is mat  # cached identity


def test_default_radial_grid():
    g = default_radial_grid(8.0)
    assert g.x_max == 8.0
    assert g.n_panels == 400


# -- structural properties ---------------------------------------------------

@given(st.floats(min_value=0.1, max_value=4.0),
       st.floats(min_value=-2.0, max_value=2.0))
def test_phi_starts_at_one(re, im):
    sf = phi_series(H3, complex(re, im), GRID)
    assert abs(sf.values[0] - 1.0) < 1e-12
    assert abs(sf.derivative_values[0]) < 1e-12


@given(st.floats(min_value=0.1, max_value=5.0))
def test_phi_is_even_in_lambda(lam):
    a = phi_series(E2, lam, GRID).values
    b = phi_series(E2, -lam, GRID).values
    assert np.array_equal(a, b)
