"""Transform layer: spherical Fourier, Abel, convolution, line functions."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from harmonic.density import make_euclidean, make_real_hyperbolic
from harmonic.grids import make_grid
from harmonic.profiles import annulus_bump, gauss_bump, smooth_bump
from harmonic.transforms import (AccuracyError, EvenLineFunction,
                                 RadialFunction, abel, abel_second_derivative,
                                 cosine_transform, eigen_multiplier_check,
                                 line_convolve, plane_integral_r3,
                                 radial_convolve, radial_integral,
                                 spherical_fourier)

E0 = make_euclidean(0)
E2 = make_euclidean(2)
H3 = make_real_hyperbolic(2)


def _gauss_line(w, S=None):
    """Even Gaussian on the line with exact node samples."""
    S = 7.5 * w if S is None else S
    g = make_grid(S, spacing=min(0.02, S / 20))
    return EvenLineFunction(grid=g, values=np.exp(-g.points**2 / (2 * w * w)),
                            support=S,
                            exact_node_values=np.exp(-g.nodes**2 / (2 * w * w)))


# -- containers ---------------------------------------------------------------

def test_radial_function_from_profile():
    f = RadialFunction.from_profile(E2, gauss_bump(0.4))
    assert f.support_radius == pytest.approx(3.0)
    # exact node samples, not spline-interpolated ones
    assert np.array_equal(f.node_values(), gauss_bump(0.4).f(f.grid.nodes))
    assert f(-0.7) == pytest.approx(f(0.7))       # even by construction
    assert f(f.grid.x_max + 1.0) == 0.0           # zero beyond the grid


def test_even_line_function_symmetry():
    g = _gauss_line(0.5)
    s = np.array([0.3, 1.1, 2.0])
    assert np.array_equal(g(-s), g(s))
    assert np.array_equal(g.derivative(-s), -g.derivative(s))
    assert g(g.grid.x_max + 0.5) == 0.0
    # analytic derivative of the Gaussian
    expect = -(s / 0.25) * np.exp(-s**2 / 0.5)
    assert np.max(np.abs(g.derivative(s) - expect)) < 1e-6


def test_transforms_reject_raw_callables():
    with pytest.raises(TypeError, match="RadialFunction or RadialProfile"):
        spherical_fourier(E2, lambda r: np.exp(-r), [1.0])


def test_fourier_requires_compact_support():
    g = make_grid(2.0, n_panels=20)
    f = RadialFunction(model=E2, grid=g, values=np.exp(-g.points),
                       support_radius=np.inf)
    with pytest.raises(ValueError, match="compact support"):
        spherical_fourier(E2, f, [1.0])


# -- closed-form oracles ------------------------------------------------------

def test_radial_integral_gaussian():
    w = 0.5
    total = radial_integral(E2, gauss_bump(w))
    exact = 4 * math.pi * w**3 * math.sqrt(math.pi / 2)
    # the profile truncates at 7.5w; the missing r^2-weighted tail is 4e-12
    assert abs(total - exact) < 1e-11 * exact


def test_spherical_fourier_line_gaussian():
    # On the line the transform is twice the cosine integral of the profile.
    w = 0.4
    lams = np.array([0.0, 0.7, 1.5, 3.0])
    got = spherical_fourier(E0, gauss_bump(w), lams).values
    exact = w * math.sqrt(2 * math.pi) * np.exp(-lams**2 * w * w / 2)
    assert np.max(np.abs(got - exact)) < 1e-10


def test_cosine_transform_gaussian():
    w = 0.4
    lams = np.array([0.0, 1.0, 2.5])
    got = cosine_transform(_gauss_line(w), lams)
    exact = w * math.sqrt(2 * math.pi) * np.exp(-lams**2 * w * w / 2)
    assert np.max(np.abs(got - exact)) < 1e-10


def test_abel_on_line_is_identity():
    f = gauss_bump(0.4)
    af = abel(E0, f)
    s = np.linspace(0.0, 1.5, 7)
    assert np.max(np.abs(af(s) - f.f(s))) < 1e-12


def test_abel_flat_space_matches_plane_integral():
    f = gauss_bump(0.4)
    af = abel(E2, f)
    s = np.linspace(0.0, 2.5, 11)
    assert np.max(np.abs(af(s) - plane_integral_r3(f, s))) < 1e-8


def test_plane_integral_gaussian_closed_form():
    w = 0.3
    f = gauss_bump(w)
    s = np.array([0.0, 0.2, 0.8])
    R = f.support
    exact = 2 * math.pi * w * w * (np.exp(-s**2 / (2 * w * w))
                                   - math.exp(-R * R / (2 * w * w)))
    assert np.max(np.abs(plane_integral_r3(f, s) - exact)) < 1e-11


def test_abel_second_derivative_consistent():
    af = abel(E2, gauss_bump(0.4))
    d2_spectral = abel_second_derivative(af)
    d2_spline = af.grid.spline(af.values).derivative(2)(af.grid.points)
    # the spline's second derivative is only O(h^2); this is a consistency
    # check of the spectral values, not an accuracy statement about splines
    inner = slice(10, -10)
    scale = np.max(np.abs(d2_spectral))
    err = np.max(np.abs(d2_spectral[inner] - d2_spline[inner]))
    assert err < 1e-3 * scale


def test_line_convolve_gaussians():
    a, b = 0.35, 0.45
    conv = line_convolve(_gauss_line(a), _gauss_line(b))
    c2 = a * a + b * b
    s = np.linspace(0.0, 1.5, 9)
    exact = math.sqrt(2 * math.pi) * a * b / math.sqrt(c2) * np.exp(-s**2 / (2 * c2))
    # the fold samples g2 through its spline, so O(h^4) interpolation error
    # (~4e-9 here) dominates the exact quadrature
    assert np.max(np.abs(conv(s) - exact)) < 1e-7


def test_radial_convolve_line_gaussians():
    # On the line the radial convolution must agree with the classical one.
    a, b = 0.35, 0.45
    h = radial_convolve(E0, gauss_bump(a), gauss_bump(b))
    c2 = a * a + b * b
    r = np.linspace(0.0, 1.2, 7)
    exact = math.sqrt(2 * math.pi) * a * b / math.sqrt(c2) * np.exp(-r**2 / (2 * c2))
    assert np.max(np.abs(h(r) - exact)) < 1e-8


# -- tail control -------------------------------------------------------------

def test_abel_refuses_nonsmooth_data():
    # kink at the origin: spectral decay is only algebraic, the tail check
    # must refuse and report the lambda_max the decay rate would demand
    g = make_grid(0.2, n_panels=20)
    tri = RadialFunction(model=E0, grid=g,
                         values=np.maximum(0.0, 1.0 - g.points / 0.2),
                         support_radius=0.2)
    with pytest.raises(AccuracyError) as exc:
        abel(E0, tri)
    assert exc.value.required_lambda_max > 2000

    out = abel(E0, tri, strict_tail=False)
    assert out.info["tail_ratio"] > 1e-8  # honest diagnostics survive


def test_abel_reports_spectral_window():
    af = abel(E2, gauss_bump(0.4))
    assert af.info["lambda_max"] >= 40.0 / 3.0
    assert af.info["tail_ratio"] <= 1e-8


# -- the multiplier identity --------------------------------------------------

def test_eigen_multiplier_identity():
    res = eigen_multiplier_check(E2, gauss_bump(0.35), 1.0)
    assert res["relative"] < 1e-8


# -- profile sanity -----------------------------------------------------------

def test_smooth_bump_support_and_center():
    f = smooth_bump(1.0)
    assert f(0.0) == pytest.approx(1.0)
    assert f(1.0) == 0.0 and f(1.5) == 0.0
    assert f.df(0.0) == 0.0


def test_annulus_bump_is_even():
    f = annulus_bump(center=1.0, width=0.25)
    assert abs(f.df(0.0)) < 1e-30
    assert f.f(0.3) == pytest.approx(f.f(-0.3) if np.ndim(0.3) else f.f(0.3))


def test_profile_laplacian_at_origin():
    f = gauss_bump(0.5)
    lap0 = f.laplacian(E2)(0.0)
    assert lap0 == pytest.approx(3 * f.d2f(0.0))


@given(st.floats(min_value=0.05, max_value=0.95))
def test_profile_derivatives_match_finite_differences(r):
    f = smooth_bump(1.0)
    h = 1e-6
    fd = (f.f(r + h) - f.f(r - h)) / (2 * h)
    assert abs(f.df(r) - fd) < 1e-5 * (1 + abs(f.df(r)))


@given(st.floats(min_value=0.2, max_value=3.0))
def test_fourier_scales_linearly(c):
    f = RadialFunction.from_profile(E2, gauss_bump(0.4))
    scaled = RadialFunction(model=E2, grid=f.grid, values=c * f.values,
                            support_radius=f.support_radius,
                            exact_node_values=c * f.node_values())
    lams = np.array([0.5, 1.5])
    a = spherical_fourier(E2, scaled, lams).values
    b = c * spherical_fourier(E2, f, lams).values
    assert np.max(np.abs(a - b)) < 1e-12 * max(1.0, float(np.max(np.abs(b))))
