"""Panelized Gauss-Legendre grids on [0, X] with cumulative integration.

Every quadrature in the package runs through this module: a Grid1D is a
partition 0 = x_0 < x_1 < ... < x_N together with a fixed-order Gauss-Legendre
rule on each panel.  Besides plain integration it supports *cumulative*
integrals evaluated both at panel boundaries and at the interior quadrature
nodes.  The node values of the antiderivative are obtained by integrating the
degree q-1 Legendre interpolant of the integrand panel by panel, which keeps
the full spectral accuracy of the rule (exact for polynomials of degree
q-1 inside a panel, exact panel sums up to degree 2q-1).

That cumulative machinery is what makes the nested Volterra integrals cheap:
each recursion level is two passes of cumulative integration over the same
node set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss, legvander
from scipy.interpolate import CubicSpline

DEFAULT_NODES_PER_PANEL = 8


def _legendre_tables(q):
    """Reference-panel tables for q-node Gauss-Legendre on [-1, 1].

    Returns (t, w, coef_mat, partial_mat) where coef_mat maps node values to
    Legendre coefficients of the interpolant and partial_mat maps those
    coefficients to the antiderivative values at the nodes,
    partial_mat[j, p] = integral of P_p from -1 to t_j.
    """
    t, w = leggauss(q)
    V = legvander(t, q)  # V[j, p] = P_p(t_j), p = 0..q
    p = np.arange(q)
    # c_p = (2p+1)/2 * sum_j w_j P_p(t_j) g_j, exact for g in P_{q-1}
    coef_mat = ((2 * p[:, None] + 1) / 2.0) * (w[None, :] * V[:, :q].T)
    partial = np.empty((q, q))
    partial[:, 0] = t + 1.0
    for pp in range(1, q):
        partial[:, pp] = (V[:, pp + 1] - V[:, pp - 1]) / (2 * pp + 1)
    return t, w, coef_mat, partial


_TABLE_CACHE: dict[int, tuple] = {}


def _tables(q):
    if q not in _TABLE_CACHE:
        _TABLE_CACHE[q] = _legendre_tables(q)
    return _TABLE_CACHE[q]


@dataclass(frozen=True)
class Grid1D:
    """Panel partition of [0, x_max] with per-panel Gauss-Legendre nodes."""

    points: np.ndarray          # (N+1,) increasing, points[0] == 0
    nodes_per_panel: int = DEFAULT_NODES_PER_PANEL
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("grid needs at least one panel")
        if pts[0] != 0.0:
            raise ValueError("grid must start at 0")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly increasing")
        if pts.size - 1 < 16:
            raise ValueError("grid must have at least 16 panels")
        object.__setattr__(self, "points", pts)

    # -- basic geometry -------------------------------------------------

    @property
    def x_max(self):
        return float(self.points[-1])

    @property
    def n_panels(self):
        return self.points.size - 1

    @property
    def q(self):
        return self.nodes_per_panel

    @property
    def nodes(self):
        """All quadrature nodes, flattened, strictly inside the panels."""
        return self._node_data()[0]

    @property
    def node_weights(self):
        return self._node_data()[1]

    def _node_data(self):
        if "nodes" not in self._cache:
            t, w, _, _ = _tables(self.q)
            a = self.points[:-1][:, None]
            b = self.points[1:][:, None]
            half = (b - a) / 2.0
            nodes = (a + b) / 2.0 + half * t[None, :]
            weights = half * w[None, :]
            self._cache["nodes"] = nodes.ravel()
            self._cache["weights"] = weights.ravel()
        return self._cache["nodes"], self._cache["weights"]

    @property
    def signature(self):
        """Hashable identity used as a cache key by other modules."""
        if "sig" not in self._cache:
            self._cache["sig"] = (self.points.tobytes(), self.q)
        return self._cache["sig"]

    # -- integration -----------------------------------------------------

    def integrate(self, node_values):
        return np.sum(self.node_weights * node_values, axis=-1)

    def panel_integrals(self, node_values):
        w = self.node_weights.reshape(self.n_panels, self.q)
        v = np.asarray(node_values).reshape(self.n_panels, self.q)
        return np.sum(w * v, axis=1)

    def cumulative_at_points(self, node_values):
        """Antiderivative (from 0) evaluated at the panel boundaries."""
        out = np.zeros(self.n_panels + 1, dtype=np.result_type(node_values, float))
        np.cumsum(self.panel_integrals(node_values), out=out[1:])
        return out

    def cumulative_at_nodes(self, node_values):
        """Antiderivative (from 0) evaluated at every quadrature node."""
        _, _, coef_mat, partial = _tables(self.q)
        v = np.asarray(node_values).reshape(self.n_panels, self.q)
        half = (np.diff(self.points) / 2.0)[:, None]
        coeffs = v @ coef_mat.T
        inner = (coeffs @ partial.T) * half
        base = self.cumulative_at_points(node_values)[:-1][:, None]
        return (base + inner).ravel()

    # -- interpolation ---------------------------------------------------

    def interp_matrix(self, even=True):
        """Linear map from values at grid points to values at the nodes.

        Cubic-spline interpolation is linear in the data, so the map is a
        matrix; `even=True` clamps the derivative to zero at x=0, the right
        boundary condition for radial (even) profiles.
        """
        key = ("interp", even)
        if key not in self._cache:
            n = self.points.size
            bc = ((1, 0.0), "not-a-knot") if even else "not-a-knot"
            cols = np.empty((self.nodes.size, n))
            eye = np.eye(n)
            for j in range(n):
                cols[:, j] = CubicSpline(self.points, eye[j], bc_type=bc)(self.nodes)
            self._cache[key] = cols
        return self._cache[key]

    def values_at_nodes(self, point_values, even=True):
        return self.interp_matrix(even=even) @ np.asarray(point_values)

    def spline(self, point_values, even=True):
        bc = ((1, 0.0), "not-a-knot") if even else "not-a-knot"
        return CubicSpline(self.points, point_values, bc_type=bc)


def make_grid(x_max, n_panels=None, spacing=0.05, kind="uniform",
              nodes_per_panel=DEFAULT_NODES_PER_PANEL):
    """Build a Grid1D on [0, x_max].

    Either give n_panels explicitly or let it follow from the requested
    spacing.  kind='graded' clusters panels quadratically toward 0.
    """
    if x_max <= 0:
        raise ValueError("x_max must be positive")
    if n_panels is None:
        n_panels = max(16, int(np.ceil(x_max / spacing)))
    n_panels = max(16, int(n_panels))
    i = np.arange(n_panels + 1) / n_panels
    if kind == "uniform":
        pts = x_max * i
    elif kind == "graded":
        pts = x_max * i**2
    else:
        raise ValueError(f"unknown grid kind {kind!r}")
    pts[0] = 0.0
    pts[-1] = x_max
    return Grid1D(points=pts, nodes_per_panel=nodes_per_panel)
