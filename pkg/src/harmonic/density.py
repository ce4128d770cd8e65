"""Radial volume densities of noncompact harmonic spaces.

A model is specified by its density θ(r) > 0, normalized so θ(r)/r^n → 1 as
r → 0, where n+1 is the manifold dimension.  Geodesic spheres have volume
vol S_r = ω_n θ(r) with ω_n the volume of the unit n-sphere.  The mean
curvature of horospheres is the limit H = lim_{r→∞} θ'(r)/θ(r); θ'/θ is
monotone nonincreasing, so the limit exists and every quantity downstream
(eigenfunction shifts λ² + H²/4, exponential volume growth, the bottom of the
spectrum H²/4) is driven by it.

Built-in families:

    euclidean(n)        θ = r^n                          H = 0
    real_hyperbolic(n)  θ = sinh^n r                     H = n
    damek_ricci(m, k)   θ = 2^{m+k} sinh^{m+k}(r/2) cosh^k(r/2)

For Damek-Ricci models H is *computed* as the large-r limit of θ'/θ; the
analytic value m/2 + k is only used as a cross-check in the tests.  Custom
densities are accepted as sympy expressions in r and validated against the
normalization, positivity, and monotonicity requirements at load time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import sympy as sp

_R = sp.Symbol("r", positive=True)

# Radius used to read off H = lim theta'/theta.  tanh saturates to 1 at
# double precision well before this, so the limit is exact for the built-ins.
H_LIMIT_RADIUS = 100.0


class DensityError(ValueError):
    """A proposed density violates the harmonic-space requirements."""


def _log_sinh(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return x + np.log1p(-np.exp(-2 * x)) - np.log(2.0)


def _log_cosh(x):
    x = np.asarray(x, dtype=float)
    return x + np.log1p(np.exp(-2 * x)) - np.log(2.0)


def _vec(f):
    """Wrap a lambdified scalar expression so output broadcasts like input."""
    def g(r):
        r = np.asarray(r, dtype=float)
        out = np.asarray(f(r), dtype=float)
        if out.shape != r.shape:
            out = np.broadcast_to(out, r.shape).copy()
        return out if r.ndim else float(out)
    return g


@dataclass(frozen=True, eq=False)
class DensityModel:
    """A harmonic space given by its radial density θ."""

    name: str
    key: str                      # stable identity string, used for caching
    n: int                        # sphere dimension; manifold dimension n+1
    H: float                      # lim theta'/theta
    theta: Callable = field(repr=False)
    theta_prime: Callable = field(repr=False)
    dlog_theta: Callable = field(repr=False)   # theta'/theta, stable at large r
    log_theta: Callable = field(repr=False)    # log theta, stable at large r
    c2: float = 0.0               # theta = r^n (1 + c2 r^2 + c4 r^4 + ...)
    c4: float = 0.0

    @property
    def dim(self):
        return self.n + 1

    @property
    def sphere_const(self):
        """ω_n, the volume of the unit n-sphere."""
        return unit_sphere_volume(self.n)

    def __repr__(self):
        return f"DensityModel({self.key}, H={self.H:.12g})"


def unit_sphere_volume(n):
    return 2.0 * math.pi ** ((n + 1) / 2.0) / math.gamma((n + 1) / 2.0)


def _series_c2_c4(theta_expr, n):
    """Taylor data of theta/r^n = 1 + c2 r^2 + c4 r^4 + O(r^6) near 0."""
    try:
        ser = sp.series(theta_expr / _R**n, _R, 0, 6).removeO()
        poly = sp.Poly(sp.expand(ser), _R)
        c2 = float(poly.coeff_monomial(_R**2))
        c4 = float(poly.coeff_monomial(_R**4))
        c0 = float(poly.coeff_monomial(1))
        c1 = float(poly.coeff_monomial(_R))
        c3 = float(poly.coeff_monomial(_R**3))
        if abs(c0 - 1.0) > 1e-12 or abs(c1) > 1e-12 or abs(c3) > 1e-12:
            raise DensityError(
                f"density not normalized: theta/r^{n} = {c0} + {c1} r + ... near 0"
            )
        return c2, c4
    except DensityError:
        raise
    except Exception:
        # Fall back to a numeric fit through three small radii.
        f = _vec(sp.lambdify(_R, theta_expr / _R**n, "numpy"))
        rs = np.array([0.02, 0.012, 0.006])
        g = f(rs) - 1.0
        V = np.vander(rs**2, 3, increasing=True)[:, 1:]  # columns r^2, r^4
        V = np.column_stack([V, rs**6])
        c2, c4, _ = np.linalg.lstsq(V, g, rcond=None)[0]
        return float(c2), float(c4)


def _build(name, key, n, theta_expr, dlog=None, log_theta=None, H=None):
    theta = _vec(sp.lambdify(_R, theta_expr, "numpy"))
    theta_prime = _vec(sp.lambdify(_R, sp.diff(theta_expr, _R), "numpy"))
    if dlog is None:
        dlog_expr = sp.simplify(sp.diff(theta_expr, _R) / theta_expr)
        dlog = _vec(sp.lambdify(_R, dlog_expr, "numpy"))
    if log_theta is None:
        raw_theta = theta
        def log_theta(r, _f=raw_theta):
            with np.errstate(divide="ignore"):
                return np.log(_f(r))
    c2, c4 = _series_c2_c4(theta_expr, n)
    if H is None:
        H = float(dlog(H_LIMIT_RADIUS))
    return DensityModel(name=name, key=key, n=n, H=H, theta=theta,
                        theta_prime=theta_prime, dlog_theta=dlog,
                        log_theta=log_theta, c2=c2, c4=c4)


def make_euclidean(n):
    """Flat model R^{n+1}: theta = r^n, H = 0."""
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")

    def dlog(r):
        r = np.asarray(r, dtype=float)
        if n == 0:
            return np.zeros_like(r) if r.ndim else 0.0
        with np.errstate(divide="ignore"):
            out = n / r
        return out if r.ndim else float(out)

    def log_theta(r):
        r = np.asarray(r, dtype=float)
        if n == 0:
            return np.zeros_like(r) if r.ndim else 0.0
        with np.errstate(divide="ignore"):
            out = n * np.log(r)
        return out if r.ndim else float(out)

    return _build(f"euclidean space R^{n+1}", f"euclidean({n})", n,
                  _R**n, dlog=dlog, log_theta=log_theta, H=0.0)


def make_real_hyperbolic(n):
    """Real hyperbolic space H^{n+1}: theta = sinh^n r, H = n."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")

    def dlog(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            out = n / np.tanh(r)
        return out if r.ndim else float(out)

    def log_theta(r):
        out = n * _log_sinh(np.asarray(r, dtype=float))
        return out if np.ndim(r) else float(out)

    return _build(f"real hyperbolic space H^{n+1}", f"real_hyperbolic({n})", n,
                  sp.sinh(_R)**n, dlog=dlog, log_theta=log_theta, H=float(n))


def make_damek_ricci(m, k):
    """Damek-Ricci space with horosphere data (m, k), dimension m + k + 1.

    theta = 2^{m+k} sinh^{m+k}(r/2) cosh^k(r/2).  H is obtained numerically
    as the limit of theta'/theta.
    """
    m, k = int(m), int(k)
    if m < 1 or k < 0:
        raise ValueError("need m >= 1 and k >= 0")
    n = m + k

    def dlog(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            out = (m + k) / (2 * np.tanh(r / 2)) + (k / 2) * np.tanh(r / 2)
        return out if r.ndim else float(out)

    def log_theta(r):
        r = np.asarray(r, dtype=float)
        out = ((m + k) * (np.log(2.0) + _log_sinh(r / 2))
               + k * _log_cosh(r / 2))
        return out if np.ndim(r) else float(out)

    expr = 2**n * sp.sinh(_R / 2)**n * sp.cosh(_R / 2)**k
    return _build(f"Damek-Ricci space ({m},{k})", f"damek_ricci({m},{k})", n,
                  expr, dlog=dlog, log_theta=log_theta, H=None)


def make_custom(theta_expr, n, name=None, validate=True):
    """Density from a sympy expression (or string) in r.

    The expression must satisfy theta/r^n -> 1 at 0, positivity on r > 0, and
    nonincreasing theta'/theta; violations raise DensityError.  Stability note:
    custom densities are evaluated directly, so they are only usable on radii
    where theta itself stays inside double-precision range.
    """
    expr = sp.sympify(theta_expr, locals={"r": _R})
    free = expr.free_symbols - {_R}
    if free:
        raise DensityError(f"theta expression has unknown symbols {free}")
    n = int(n)
    key = f"custom({sp.srepr(expr)},n={n})"
    model = _build(name or f"custom density {expr}", key, n, expr)
    if validate:
        validate_density(model)
    return model


def validate_density(model, r_max=50.0, tol=1e-7):
    """Check the harmonic-space requirements on a sample grid; hard error."""
    r = np.linspace(1e-3, r_max, 2001)
    th = model.theta(r)
    if not np.all(np.isfinite(th)) or np.any(th <= 0):
        raise DensityError("theta must be finite and positive on (0, r_max]")
    small = np.array([1e-4, 3e-4, 1e-3])
    ratio = model.theta(small) / small**model.n
    if np.max(np.abs(ratio - 1.0)) > 1e-4:
        raise DensityError(
            f"theta(r)/r^{model.n} -> {ratio[-1]:.6g} near 0, expected 1")
    d = model.dlog_theta(r)
    if np.any(np.diff(d) > tol):
        i = int(np.argmax(np.diff(d)))
        raise DensityError(
            f"theta'/theta increases near r = {r[i]:.3g}; "
            "not a harmonic density")
    if np.any(d < -tol):
        raise DensityError("theta must be nondecreasing (theta'/theta >= 0)")
    # d decreases toward H, so H is a lower bound on the whole window; the
    # limit itself is not attainable on a finite grid (flat models decay
    # like n/r), so only the one-sided comparison is checked.
    if d[-1] < model.H - 1e-6 * (1 + abs(model.H)):
        raise DensityError(
            f"theta'/theta = {d[-1]:.6g} at r = {r_max:g} drops below the "
            f"stored limit H = {model.H:.6g}")
    return True


def mean_curvature_limit(model, r_max=H_LIMIT_RADIUS):
    """theta'(r_max)/theta(r_max): converges to H as r_max grows."""
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    return float(model.dlog_theta(float(r_max)))


# ---------------------------------------------------------------------------
# plain-text config files:  key = value lines, # comments
# ---------------------------------------------------------------------------

_MODEL_ALIASES = {
    "euclidean": "euclidean",
    "hyperbolic": "hyperbolic",
    "real_hyperbolic": "hyperbolic",
    "damek-ricci": "damek_ricci",
    "damek_ricci": "damek_ricci",
    "custom": "custom",
}


def parse_model_config(text):
    """Parse `key = value` lines into a dict (no interpretation)."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DensityError(f"config line {lineno}: expected key = value")
        key, val = line.split("=", 1)
        out[key.strip().lower()] = val.strip()
    return out


def model_from_config(text):
    """Build a DensityModel from config text (see parse_model_config)."""
    cfg = parse_model_config(text)
    kind = cfg.get("model")
    if kind is None:
        raise DensityError("config must set model = ...")
    kind = _MODEL_ALIASES.get(kind.lower())
    if kind is None:
        raise DensityError(f"unknown model {cfg['model']!r}")
    if kind == "euclidean":
        return make_euclidean(int(cfg["n"]))
    if kind == "hyperbolic":
        return make_real_hyperbolic(int(cfg["n"]))
    if kind == "damek_ricci":
        return make_damek_ricci(int(cfg["m"]), int(cfg["k"]))
    if "theta" not in cfg or "n" not in cfg:
        raise DensityError("custom model needs theta = <expr> and n = <int>")
    return make_custom(cfg["theta"], int(cfg["n"]))


def load_model_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_config(fh.read())


def builtin_models():
    """The five standard models used throughout the test batteries."""
    return [
        make_euclidean(0),
        make_euclidean(2),
        make_real_hyperbolic(2),
        make_damek_ricci(2, 1),
        make_damek_ricci(1, 1),
    ]
