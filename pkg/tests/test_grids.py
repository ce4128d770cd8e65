"""Quadrature grid behavior: exactness, cumulants, construction guards."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from harmonic.grids import DEFAULT_NODES_PER_PANEL, Grid1D, make_grid


def test_integrate_exact_for_degree_15():
    # 8-node Gauss-Legendre panels integrate degree 2q-1 = 15 exactly.
    g = make_grid(2.0, n_panels=16)
    coeffs = np.array([0.3, -1.2, 0.7, 2.0, -0.25, 0.11, 1.5, -0.4,
                       0.9, 0.05, -0.6, 0.33, 0.21, -0.08, 0.5, 1.1])
    x = g.nodes
    vals = np.polynomial.polynomial.polyval(x, coeffs)
    exact = sum(c * 2.0 ** (k + 1) / (k + 1) for k, c in enumerate(coeffs))
    assert abs(g.integrate(vals) - exact) <= 1e-13 * abs(exact)


def test_integrate_smooth_function():
    g = make_grid(np.pi, n_panels=20)
    assert abs(g.integrate(np.sin(g.nodes)) - 2.0) < 1e-14


def test_panel_integrals_sum_to_total():
    g = make_grid(3.0, n_panels=24)
    vals = np.exp(-g.nodes)
    assert abs(np.sum(g.panel_integrals(vals)) - g.integrate(vals)) < 1e-15


def test_cumulative_at_points_matches_antiderivative():
    g = make_grid(4.0, n_panels=40)
    cum = g.cumulative_at_points(np.cos(g.nodes))
    assert cum[0] == 0.0
    assert np.max(np.abs(cum - np.sin(g.points))) < 1e-14


def test_cumulative_at_nodes_matches_antiderivative():
    g = make_grid(4.0, n_panels=40)
    cum = g.cumulative_at_nodes(np.cos(g.nodes))
    assert np.max(np.abs(cum - np.sin(g.nodes))) < 1e-13


def test_cumulative_at_nodes_exact_for_interpolant_degree():
    # Inside one panel the antiderivative of the degree q-1 interpolant is
    # reproduced exactly, so degree 7 data gives machine-level cumulants.
    g = make_grid(1.5, n_panels=16)
    c = np.array([1.0, -0.5, 0.25, 2.0, -1.5, 0.75, 0.1, -0.3])
    vals = np.polynomial.polynomial.polyval(g.nodes, c)
    anti = np.polynomial.polynomial.polyint(c)
    expect = np.polynomial.polynomial.polyval(g.nodes, anti)
    assert np.max(np.abs(g.cumulative_at_nodes(vals) - expect)) < 1e-13


def test_cumulative_handles_complex_values():
    g = make_grid(2.0, n_panels=20)
    lam = 1.0 + 0.5j
    vals = np.exp(lam * g.nodes)
    expect = (np.exp(lam * g.points) - 1.0) / lam
    assert np.max(np.abs(g.cumulative_at_points(vals) - expect)) < 1e-13


def test_nodes_lie_inside_panels_and_weights_sum():
    g = make_grid(5.0, n_panels=25)
    assert np.all(g.nodes > 0.0) and np.all(g.nodes < 5.0)
    assert np.all(np.diff(g.nodes) > 0)
    assert abs(np.sum(g.node_weights) - 5.0) < 1e-13
    assert g.nodes.size == g.n_panels * g.q


def test_grid_construction_guards():
    with pytest.raises(ValueError, match="start at 0"):
        Grid1D(points=np.linspace(1.0, 2.0, 33))
    with pytest.raises(ValueError, match="strictly increasing"):
        pts = np.linspace(0.0, 1.0, 33)
        pts[5] = pts[4]
        Grid1D(points=pts)
    with pytest.raises(ValueError, match="at least 16 panels"):
        Grid1D(points=np.linspace(0.0, 1.0, 10))
    with pytest.raises(ValueError, match="at least one panel"):
        Grid1D(points=np.array([0.0]))


def test_make_grid_guards():
    with pytest.raises(ValueError, match="positive"):
        make_grid(-1.0)
    with pytest.raises(ValueError, match="unknown grid kind"):
        make_grid(1.0, kind="chebyshev")


def test_make_grid_spacing_and_minimum():
    assert make_grid(10.0, spacing=0.05).n_panels == 200
    # tiny domain still gets the 16-panel floor
    assert make_grid(0.1, spacing=0.05).n_panels == 16


def test_graded_grid_clusters_toward_zero():
    g = make_grid(4.0, n_panels=32, kind="graded")
    widths = np.diff(g.points)
    assert g.points[0] == 0.0 and g.points[-1] == 4.0
    assert np.all(np.diff(widths) > 0)  # panels widen monotonically


def test_signature_identity():
    a = make_grid(2.0, n_panels=16)
    b = make_grid(2.0, n_panels=16)
    c = make_grid(2.0, n_panels=16, nodes_per_panel=10)
    d = make_grid(2.0, n_panels=17)
    assert a.signature == b.signature
    assert a.signature != c.signature
    assert a.signature != d.signature


def test_even_spline_has_flat_center():
    g = make_grid(3.0, n_panels=30)
    vals = np.cosh(g.points)  # even profile, nonzero curvature at 0
    s = g.spline(vals)
    assert abs(s(0.0, 1)) < 1e-14
    assert np.max(np.abs(s(g.nodes) - g.values_at_nodes(vals))) < 1e-12


def test_values_at_nodes_accuracy():
    g = make_grid(3.0, spacing=0.05)
    approx = g.values_at_nodes(np.cos(g.points))
    # cubic interpolation on 0.05 spacing; the not-a-knot end dominates
    assert np.max(np.abs(approx - np.cos(g.nodes))) < 1e-6


@given(st.integers(min_value=0, max_value=15))
def test_monomial_exactness(k):
    g = make_grid(1.0, n_panels=16)
    got = g.integrate(g.nodes ** k)
    assert abs(got - 1.0 / (k + 1)) < 1e-14


@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=-5, max_value=5))
def test_integrate_is_linear(a, b):
    g = make_grid(1.0, n_panels=16)
    f1, f2 = np.sin(g.nodes), np.exp(-g.nodes)
    lhs = g.integrate(a * f1 + b * f2)
    rhs = a * g.integrate(f1) + b * g.integrate(f2)
    assert abs(lhs - rhs) < 1e-12
