"""Explicit 2D spaces for exercising the non-radial operator identities.

Density models only see radial profiles, so identities involving genuinely
non-radial functions (the spherical projector π, sphere translation T_r, the
displacement rule for eigenfunctions) need a space with actual points and a
closed-form distance.  Two suffice: the Euclidean plane and the hyperbolic
plane.  Both are two-dimensional, so every sphere is a parameterized circle
and the trapezoid rule converges spectrally on smooth integrands.

Point conventions: plane points are (x, y) rows; hyperbolic points live on
the upper hyperboloid t² - x² - y² = 1 in Minkowski 3-space as (t, x, y)
rows.  The hyperbolic distance uses the difference-vector form
d = 2 asinh(|x - y|_L / 2), which stays accurate for nearby points where
arcosh of the Lorentz product loses half the digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import make_euclidean, make_real_hyperbolic
from .grids import make_grid
from .profiles import smooth_bump
from .spherical import phi_ode_values

__all__ = [
    "ExplicitSpace",
    "make_plane",
    "make_hyperbolic_plane",
    "space_by_tag",
    "sphere_average",
    "project",
    "bump_patch",
    "displacement_identity_check",
    "projector_convolution_check",
    "projector_selfadjoint_check",
    "idempotence_check",
]

MIN_QUAD_ORDER = 64


def _lorentz(u, v):
    return np.sum(u[..., 1:] * v[..., 1:], axis=-1) - u[..., 0] * v[..., 0]


def _frame(x):
    """Lorentz-orthonormal tangent basis at a hyperboloid point."""
    def proj(v):
        return v + _lorentz(v, x) * x
    a = proj(np.array([0.0, 1.0, 0.0]))
    e1 = a / math.sqrt(_lorentz(a, a))
    b = proj(np.array([0.0, 0.0, 1.0]))
    b = b - _lorentz(b, e1) * e1
    e2 = b / math.sqrt(_lorentz(b, b))
    return e1, e2


@dataclass(frozen=True)
class ExplicitSpace:
    """A 2D model geometry with closed-form distance and circle charts.

    density is the paired radial model (θ = r for the plane, θ = sinh r for
    the hyperbolic plane); circumference(r) must equal ω₁ θ(r), which the
    tests verify rather than assume.
    """

    tag: str
    density: object

    @property
    def origin(self):
        if self.tag == "plane":
            return np.zeros(2)
        return np.array([1.0, 0.0, 0.0])

    def distance(self, x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        if self.tag == "plane":
            return np.linalg.norm(x - y, axis=-1)
        q = _lorentz(x - y, x - y)
        return 2.0 * np.arcsinh(0.5 * np.sqrt(np.maximum(q, 0.0)))

    def sphere_param(self, x, r, phi):
        """Point(s) on the geodesic circle S_r(x) at angle(s) phi.

        x is a single point; r and phi broadcast against each other and the
        result has their common shape plus the embedding axis.
        """
        x = np.asarray(x, float)
        r, phi = np.broadcast_arrays(np.asarray(r, float),
                                     np.asarray(phi, float))
        if self.tag == "plane":
            heading = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
            return x + r[..., None] * heading
        e1, e2 = _frame(x)
        heading = np.cos(phi)[..., None] * e1 + np.sin(phi)[..., None] * e2
        return np.cosh(r)[..., None] * x + np.sinh(r)[..., None] * heading

    def circumference(self, r):
        r = np.asarray(r, float)
        if self.tag == "plane":
            return 2.0 * np.pi * r
        return 2.0 * np.pi * np.sinh(r)


def make_plane():
    return ExplicitSpace("plane", make_euclidean(1))


def make_hyperbolic_plane():
    return ExplicitSpace("hyperbolic_plane", make_real_hyperbolic(1))


def space_by_tag(tag):
    if tag in ("plane", "euclidean"):
        return make_plane()
    if tag in ("hyperbolic_plane", "h2"):
        return make_hyperbolic_plane()
    raise ValueError(f"unknown explicit space {tag!r}")


def _eval_points(f, pts):
    """Apply a point function to an (..., d) stack of points."""
    flat = pts.reshape(-1, pts.shape[-1])
    vals = np.asarray(f(flat), float)
    if vals.shape != (flat.shape[0],):
        vals = np.array([float(f(p)) for p in flat])
    return vals.reshape(pts.shape[:-1])


def _check_order(quad_order):
    if quad_order < MIN_QUAD_ORDER:
        raise ValueError(f"quad_order must be at least {MIN_QUAD_ORDER}")


def _angles(n):
    return np.arange(n) * (2.0 * np.pi / n)


def sphere_average(space, f, x, r, quad_order=256):
    """(π_x f)(r): the mean of f over the geodesic circle S_r(x).

    Equal-angle samples make this the trapezoid rule on a smooth periodic
    integrand, so the error decays spectrally in quad_order.
    """
    _check_order(quad_order)
    pts = space.sphere_param(x, r, _angles(quad_order))
    return float(np.mean(_eval_points(f, pts)))


def project(space, f, radii, quad_order=256):
    """Radial profile of the projector πf about the origin, at many radii."""
    _check_order(quad_order)
    radii = np.asarray(radii, float)
    pts = space.sphere_param(space.origin, radii[:, None],
                             _angles(quad_order)[None, :])
    return np.mean(_eval_points(f, pts), axis=-1)


def bump_patch(space, center, width):
    """Smooth compactly supported bump around an arbitrary point."""
    prof = smooth_bump(width)
    center = np.asarray(center, float)

    def f(pts):
        return prof.f(space.distance(center, pts))

    return f


def _phi_at(model, lam, d):
    """φ_λ of the paired density model at arbitrary (unsorted) distances."""
    d = np.asarray(d, float)
    flat = d.ravel()
    order = np.argsort(flat, kind="stable")
    vals, _ = phi_ode_values(model, [lam], flat[order])
    out = np.empty(flat.shape, dtype=vals.dtype)
    out[order] = vals[0]
    return out.reshape(d.shape)


def displacement_identity_check(space, lam, x, r_grid, quad_order=256):
    """sup_r | π((φ_λ)_x)(r) - φ_λ(d(x₀,x)) φ_λ(r) |.

    Averaging the displaced eigenfunction z ↦ φ_λ(d(x, z)) over circles
    about the origin must reproduce φ_λ(d(x₀,x)) φ_λ(r); one batched ODE
    solve evaluates φ_λ at every distance this needs.
    """
    _check_order(quad_order)
    x = np.asarray(x, float)
    x0 = space.origin
    r_grid = np.asarray(r_grid, float)
    pts = space.sphere_param(x0, r_grid[:, None], _angles(quad_order)[None, :])
    dists = space.distance(x, pts)

    model = space.density
    d0 = float(space.distance(x0, x))
    block = np.concatenate([dists.ravel(), r_grid, [d0]])
    phis = _phi_at(model, lam, block)
    n = dists.size
    lhs = np.mean(phis[:n].reshape(dists.shape), axis=-1)
    rhs = phis[-1] * phis[n:n + r_grid.size]
    return float(np.max(np.abs(lhs - rhs)))


def projector_convolution_check(space, r, f, y_radii=None, quad_order=256):
    """Residual of π(T_r * f) = T_r * (π f) along a ray from the origin.

    T_r * f is the unnormalized circle integral circumference(r) times the
    circle mean.  Both sides are radial about the origin (π f is radial,
    and T_r preserves radiality), so comparing at radii along one ray is
    comparing the full functions.
    """
    _check_order(quad_order)
    if y_radii is None:
        y_radii = np.linspace(0.2, 2.0, 10)
    y_radii = np.asarray(y_radii, float)
    x0 = space.origin
    circ = float(space.circumference(r))
    psi = _angles(quad_order)

    worst = 0.0
    for s in y_radii:
        # left side: average T_r*f over the circle S_s(x0)
        ys = space.sphere_param(x0, s, psi)
        lhs = 0.0
        for y in ys:
            lhs += circ * np.mean(_eval_points(f, space.sphere_param(y, r, psi)))
        lhs /= len(ys)

        # right side: circle integral of πf over S_r(y) for one y on the ray
        y = space.sphere_param(x0, s, 0.0)
        zs = space.sphere_param(y, r, psi)
        inner = np.empty(len(zs))
        for i, z in enumerate(zs):
            d = float(space.distance(x0, z))
            inner[i] = np.mean(_eval_points(f, space.sphere_param(x0, d, psi)))
        rhs = circ * float(np.mean(inner))
        worst = max(worst, abs(lhs - rhs))
    return worst


def projector_selfadjoint_check(space, f, g, domain_radius, quad_order=256,
                                inner_order=None, radial_spacing=0.02):
    """| ⟨πf, g⟩ - ⟨f, πg⟩ | over the disk of the given radius.

    The area element in geodesic polar coordinates is θ(s) ds dφ, so each
    pairing reduces to a radial integral of (projector of one factor) times
    (circle mean of the other).  The projector deliberately uses a different
    angular rule than the pairing (offset nodes, higher order): with shared
    nodes the two sides would be the same floating-point expression and the
    check would be vacuous.  Both f and g must be supported in the disk.
    """
    _check_order(quad_order)
    if inner_order is None:
        inner_order = quad_order + quad_order // 2
    _check_order(inner_order)
    sgrid = make_grid(domain_radius, spacing=radial_spacing)
    s = sgrid.nodes
    x0 = space.origin

    outer = _angles(quad_order)
    inner = _angles(inner_order) + np.pi / inner_order
    pts_out = space.sphere_param(x0, s[:, None], outer[None, :])
    pts_in = space.sphere_param(x0, s[:, None], inner[None, :])
    fbar = np.mean(_eval_points(f, pts_out), axis=-1)
    gbar = np.mean(_eval_points(g, pts_out), axis=-1)
    pf = np.mean(_eval_points(f, pts_in), axis=-1)
    pg = np.mean(_eval_points(g, pts_in), axis=-1)

    theta = space.density.theta(s)
    two_pi = 2.0 * np.pi
    lhs = two_pi * sgrid.integrate(pf * gbar * theta)
    rhs = two_pi * sgrid.integrate(fbar * pg * theta)
    return abs(lhs - rhs)


def idempotence_check(space, f, radii=None, quad_order=256):
    """max_r | π(πf)(r) - (πf)(r) |; πf is already radial, so π fixes it."""
    _check_order(quad_order)
    if radii is None:
        radii = np.linspace(0.1, 3.0, 12)
    radii = np.asarray(radii, float)

    def pf(pts):
        d = space.distance(space.origin, pts)
        return project_values_at(space, f, d, quad_order)

    once = project(space, f, radii, quad_order=quad_order)
    twice = project(space, pf, radii, quad_order=quad_order)
    return float(np.max(np.abs(twice - once)))


def project_values_at(space, f, distances, quad_order=256):
    """(πf) evaluated at arbitrary distances (vectorized helper)."""
    d = np.asarray(distances, float)
    flat = d.ravel()
    vals = project(space, f, flat, quad_order=quad_order)
    return vals.reshape(d.shape)
