"""Named verification battery covering every acceptance criterion.

Each check is one verifiable statement with a measured number and a bound;
the CLI `suite` subcommand and the acceptance tests both run this registry,
so the command-line verdict and the test suite cannot drift apart.  Checks
are independent and may run in parallel (HARMONIC_THREADS); results are
reported in registration order regardless of completion order.
"""

from __future__ import annotations

import math
import os
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import asymptotics, geometry, pde, profiles, transforms, two_radius
from .density import (builtin_models, make_damek_ricci, make_euclidean,
                      make_real_hyperbolic)
from .grids import make_grid
from .spherical import phi, phi_ode, phi_series, volterra_coefficients
from .transforms import EvenLineFunction, RadialFunction

DEFAULT_SEED = 20260814

__all__ = ["CheckResult", "SuiteReport", "run_suite", "registered_checks",
           "DEFAULT_SEED"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    criterion: int
    passed: bool
    measured: float
    bound: float
    comparison: str
    detail: str
    seconds: float


@dataclass(frozen=True)
class SuiteReport:
    checks: tuple
    quick: bool
    seed: int

    @property
    def all_passed(self):
        return all(c.passed for c in self.checks)

    @property
    def seconds(self):
        return sum(c.seconds for c in self.checks)


@dataclass(frozen=True)
class _Check:
    name: str
    criterion: int
    quick: bool
    fn: object


_REGISTRY: list[_Check] = []


def _check(name, criterion, quick=True):
    def wrap(fn):
        _REGISTRY.append(_Check(name, criterion, quick, fn))
        return fn
    return wrap


def registered_checks(quick=False):
    return [c for c in _REGISTRY if c.quick or not quick]


# ---------------------------------------------------------------------------
# shared fixtures (cached; checks may run concurrently, recompute is benign)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _model(key):
    return {
        "e0": make_euclidean(0),
        "e2": make_euclidean(2),
        "h3": make_real_hyperbolic(2),
        "dr21": make_damek_ricci(2, 1),
        "dr11": make_damek_ricci(1, 1),
    }[key]


@lru_cache(maxsize=None)
def _grid10():
    return make_grid(10.0, spacing=0.05)


@lru_cache(maxsize=None)
def _wave_states(key):
    return pde.radial_wave_solve(_model(key), profiles.smooth_bump(1.0),
                                 6.0, 0.004)


@lru_cache(maxsize=None)
def _cheeger(key):
    return asymptotics.cheeger_chain_report(_model(key))


@lru_cache(maxsize=None)
def _gauss_line(width, S):
    grid = make_grid(S, spacing=0.01)

    def f(s):
        return np.exp(-((s / width) ** 2))

    def df(s):
        return -2.0 * s / width**2 * np.exp(-((s / width) ** 2))

    return EvenLineFunction(grid, f(grid.points), S,
                            deriv_values=df(grid.points),
                            exact_node_values=f(grid.nodes))


def _phi_oracle(key, lam, r):
    lam = complex(lam)
    if key == "e0":
        return np.cos(lam * r)
    if key == "e2":
        out = np.ones(r.shape, dtype=complex)
        nz = r > 0
        out[nz] = np.sin(lam * r[nz]) / (lam * r[nz])
        return out
    if key == "h3":
        out = np.ones(r.shape, dtype=complex)
        nz = r > 0
        out[nz] = np.sin(lam * r[nz]) / (lam * np.sinh(r[nz]))
        return out
    raise KeyError(key)


# ---------------------------------------------------------------------------
# criterion 1: eigenfunction oracles
# ---------------------------------------------------------------------------

def _phi_oracle_check(key, lam):
    def fn(ctx):
        grid = _grid10()
        vals = phi(_model(key), lam, grid).values
        oracle = _phi_oracle(key, lam, grid.points)
        err = float(np.max(np.abs(vals - oracle)))
        return err, 1e-8, f"max deviation from the closed form at λ={lam}"
    return fn


for _key in ("e0", "e2", "h3"):
    for _lam in (0.5, 1.0, 2.0, 1 + 0.5j):
        _tag = str(_lam).replace("(", "").replace(")", "").replace(" ", "")
        _check(f"phi_oracle_{_key}_lam_{_tag}", 1)(_phi_oracle_check(_key, _lam))


@_check("phi_paths_agree_dr21", 1)
def _paths_agree(ctx):
    grid = _grid10()
    worst = 0.0
    for lam in (0.5, 1.0, 2.0, 1 + 0.5j):
        a = phi_series(_model("dr21"), lam, grid).values
        b = phi_ode(_model("dr21"), lam, grid).values
        worst = max(worst, float(np.max(np.abs(a - b))))
    return worst, 1e-8, "series vs ODE evaluation on Damek-Ricci(2,1)"


# ---------------------------------------------------------------------------
# criterion 2: coefficient bounds
# ---------------------------------------------------------------------------

def _volterra_caps():
    r = _grid10().points
    k = np.arange(1, 21)[:, None]
    log_cap = 2 * k * np.log(np.maximum(r, 1e-300)) - \
        np.array([math.lgamma(2 * kk + 1) for kk in range(1, 21)])[:, None]
    cap = np.exp(log_cap)
    # violations are measured in units of each row's sup: the recursion
    # carries absolute noise near r = 0 (observed ~1e-17 of the row scale),
    # so a pointwise-relative test at 1e-100-sized values is meaningless
    return cap, cap[:, -1:]


def _volterra_check(key):
    def fn(ctx):
        coef = volterra_coefficients(_model(key), _grid10(), 20)
        cap, rowscale = _volterra_caps()
        a = coef.point_values
        viol = float(np.max(np.maximum(a - cap, -a) / rowscale))
        return viol, 1e-12, \
            "worst violation of 0 ≤ a_k ≤ r^{2k}/(2k)!, k ≤ 20, r ≤ 10"
    return fn


for _key in ("e0", "e2", "h3", "dr21", "dr11"):
    _check(f"volterra_bounds_{_key}", 2)(_volterra_check(_key))


@_check("volterra_equality_flat", 2)
def _volterra_flat(ctx):
    coef = volterra_coefficients(_model("e0"), _grid10(), 20)
    cap, rowscale = _volterra_caps()
    worst = float(np.max(np.abs(coef.point_values - cap) / rowscale))
    return worst, 1e-12, "on the line the bound is attained: a_k = r^{2k}/(2k)!"


# ---------------------------------------------------------------------------
# criterion 3: the constant eigenfunction
# ---------------------------------------------------------------------------

def _special_phi_check(key):
    def fn(ctx):
        model = _model(key)
        grid = _grid10()
        worst = 0.0
        for sign in (+1.0, -1.0):
            vals = phi(model, sign * 0.5j * model.H, grid).values
            worst = max(worst, float(np.max(np.abs(vals - 1.0))))
        return worst, 1e-10, "φ at λ = ±iH/2 must be identically 1"
    return fn


for _key in ("e0", "e2", "h3", "dr21", "dr11"):
    _check(f"phi_constant_at_pm_iH2_{_key}", 3)(_special_phi_check(_key))


# ---------------------------------------------------------------------------
# criterion 4: Abel/Fourier transform suite
# ---------------------------------------------------------------------------

@_check("paley_wiener_leak_e2", 4)
def _pw_leak(ctx):
    f = profiles.smooth_bump(1.5)
    g = transforms.abel(_model("e2"), f, s_max=f.support + 2.0)
    outside = g.grid.points > f.support + 1e-9
    return float(np.max(np.abs(g.values[outside]))), 1e-8, \
        "Abel image beyond the support radius of the datum"


@_check("abel_geometric_oracle_r3", 4)
def _abel_r3(ctx):
    f = profiles.smooth_bump(1.5)
    g = transforms.abel(_model("e2"), f, s_max=f.support + 2.0)
    oracle = transforms.plane_integral_r3(f, g.grid.points)
    return float(np.max(np.abs(g.values - oracle))), 1e-8, \
        "spectral Abel path vs direct plane integrals on R³"


def _factorization_check(key):
    def fn(ctx):
        model = _model(key)
        f, g = profiles.gauss_bump(0.35), profiles.gauss_bump(0.45)
        conv = transforms.radial_convolve(model, f, g)
        lams = np.linspace(0.0, 6.0, 25)
        Fc = transforms.spherical_fourier(model, conv, lams).values
        Ff = transforms.spherical_fourier(
            model, RadialFunction.from_profile(model, f), lams).values
        Fg = transforms.spherical_fourier(
            model, RadialFunction.from_profile(model, g), lams).values
        rel = float(np.max(np.abs(Fc - Ff * Fg)) / np.max(np.abs(Ff * Fg)))
        return rel, 1e-6, "F(f*g) = Ff · Fg, relative on λ ∈ [0, 6]"
    return fn


_check("fourier_factorization_e2", 4)(_factorization_check("e2"))
_check("fourier_factorization_h3", 4)(_factorization_check("h3"))


def _roundtrip_check(key):
    def fn(ctx):
        model = _model(key)
        f = profiles.gauss_bump(0.4)
        finv = transforms.abel_inverse(model, transforms.abel(model, f))
        truth = f.f(finv.grid.points)
        rel = float(np.max(np.abs(finv.values - truth))
                    / np.max(np.abs(truth)))
        return rel, 1e-6, "abel_inverse ∘ abel identity on a Gaussian bump"
    return fn


_check("abel_roundtrip_e2", 4)(_roundtrip_check("e2"))
_check("abel_roundtrip_h3", 4)(_roundtrip_check("h3"))


# ---------------------------------------------------------------------------
# criterion 5: the intertwining identity
# ---------------------------------------------------------------------------

def _intertwine_model_check(key):
    def fn(ctx):
        model = _model(key)
        worst = max(pde.intertwine_check(model, f)
                    for f in profiles.standard_suite())
        return worst, 1e-5, "A(Δf) = (d²/ds² - H²/4)Af over the 5-bump suite"
    return fn


for _key in ("e0", "e2", "h3", "dr21", "dr11"):
    _check(f"intertwining_{_key}", 5)(_intertwine_model_check(_key))


# ---------------------------------------------------------------------------
# criterion 6: Klein-Gordon kernel and solver
# ---------------------------------------------------------------------------

@_check("kg_kernel_diagonal", 6)
def _kg_diag(ctx):
    worst = 0.0
    for H in (0.7, 2.0, 3.5):
        t = np.linspace(0.05, 10.0, 60)
        w = np.array([pde.kg_kernel(H, tt, tt) for tt in t])
        exact = -H * H * t / 16.0
        worst = max(worst, float(np.max(np.abs(w - exact)
                                        / np.maximum(np.abs(exact), 1e-300))))
    return worst, 1e-14, "W(t, t) = -H²t/16 follows from the k = 0 term alone"


@_check("kg_energy_drift", 6)
def _kg_energy(ctx):
    g = _gauss_line(0.8, 6.0)
    worst = 0.0
    for H in (0.0, 1.0, 2.0):
        e0 = pde.kg_solve(H, g, 0.25).info["energy"]
        for t in (1.0, 3.0, 10.0):
            e = pde.kg_solve(H, g, t).info["energy"]
            worst = max(worst, abs(e / e0 - 1.0))
    return worst, 1e-6, "relative energy drift over t ∈ [0, 10], H ∈ {0,1,2}"


@_check("wave_to_kg_h3", 6)
def _wave_kg(ctx):
    res = pde.wave_to_kg_check(_model("h3"), profiles.gauss_bump(0.5), 3.0)
    return res, 1e-4, "Abel transform of the wave slice vs the kernel solver"


# ---------------------------------------------------------------------------
# criterion 7: finite propagation speed
# ---------------------------------------------------------------------------

def _slope_check(key):
    def fn(ctx):
        slope = pde.support_growth_slope(_wave_states(key))
        return abs(slope - 1.0), 0.02, \
            f"support growth slope {slope:.4f} (unit speed window)"
    return fn


for _key in ("e0", "e2", "h3", "dr21", "dr11"):
    _check(f"propagation_speed_{_key}", 7)(_slope_check(_key))


# ---------------------------------------------------------------------------
# criterion 8: two-radius certificates on the line
# ---------------------------------------------------------------------------

@_check("bad_radii_odd_odd", 8)
def _bad_radii(ctx):
    # the box reaches -(9π/2)², so denominators 2b+1 run through b ≤ 4
    found = np.array(two_radius.bad_radii(_model("e0"), 1.0, "sphere",
                                          box=(-210 - 8j, 5 + 8j), r_max=10.0))
    oracle = sorted({(2 * a + 1) / (2 * b + 1)
                     for b in range(5) for a in range(80)
                     if (2 * a + 1) / (2 * b + 1) <= 10.0})
    if found.size != len(oracle):
        return float("inf"), 1e-10, \
            f"expected {len(oracle)} radii, found {found.size}"
    err = float(np.max(np.abs(found - np.array(oracle))))
    return err, 1e-10, f"odd/odd rational set, {len(oracle)} radii ≤ 10"


@_check("certify_reject_1_3", 8)
def _certify_reject(ctx):
    cert = two_radius.certify_pair(_model("e0"), 1.0, 3.0)
    if cert.verdict != "common-zero-found":
        return float("inf"), 1e-9, f"unexpected verdict {cert.verdict}"
    err = abs(cert.witness - (-((math.pi / 2) ** 2)))
    return err, 1e-9, "witness must be the first common cosine zero -(π/2)²"


@_check("certify_accept_1_sqrt2", 8)
def _certify_accept(ctx):
    cert = two_radius.certify_pair(_model("e0"), 1.0, math.sqrt(2.0),
                                   box=(-400 - 20j, 2 + 20j))
    ok = cert.verdict == "no-common-zero-in-box"
    return (0.0 if ok else 1.0), 0.5, \
        f"verdict {cert.verdict} on |Re L| ≤ 400 (irrational ratio)"


@_check("mvp_cosine_counterexample", 8)
def _mvp_demo(ctx):
    res = two_radius.mvp_counterexample_demo(seed=ctx["seed"])
    good = max(res["residual_2pi"], res["residual_linear"])
    return good, 1e-14, (
        "cos satisfies the mean value property at 2π "
        f"(and fails at π: residual {res['residual_pi']:.3f})")


@_check("mvp_certify_2pi_4pi", 8, quick=False)
def _mvp_certify(ctx):
    cert = two_radius.certify_pair(_model("e0"), 2 * math.pi, 4 * math.pi,
                                   variant="mvp", box=(-3 - 3j, 1 + 3j))
    if cert.verdict != "common-zero-found":
        return float("inf"), 1e-6, f"unexpected verdict {cert.verdict}"
    err = min(abs(z - (-1.0)) for z in cert.common)
    return err, 1e-6, ("2π and 4π share the mean-value zero L = -1 "
                       "(double zero: located only to sqrt of the residual)")


# ---------------------------------------------------------------------------
# criterion 9: heat multiplier identity and mass conservation
# ---------------------------------------------------------------------------

def _heat_identity_check(key):
    def fn(ctx):
        err = pde.heat_identity_check(_model(key), 0.5,
                                      np.linspace(0.0, 2.0, 9))
        return err, 1e-3, "F k_t / F k_0 vs exp(-(λ²+H²/4)t) at t = 0.5"
    return fn


for _key in ("e0", "h3", "dr21"):
    _check(f"heat_multiplier_{_key}", 9)(_heat_identity_check(_key))


@_check("heat_mass_conserved", 9)
def _heat_mass(ctx):
    states = pde.radial_heat_solve(_model("dr21"), 0.5, 0.3)
    m0 = states[0].mass
    drift = max(abs(s.mass / m0 - 1.0) for s in states)
    return drift, 1e-5, "discrete mass under the zero-flux scheme"


# ---------------------------------------------------------------------------
# criterion 10: growth chain and spectral bottom
# ---------------------------------------------------------------------------

def _growth_rate_check(key):
    def fn(ctx):
        rep = _cheeger(key)
        err = abs(rep.mu_final - rep.H)
        return err, 1e-8, f"θ'/θ(40) = {rep.mu_final!r} vs H = {rep.H!r}"
    return fn


def _volume_ratio_check(key):
    def fn(ctx):
        rep = _cheeger(key)
        r, v = rep.mu_estimates[-1]
        return abs(v - rep.H), 0.05, f"log vol B_r / r at r = {r:g} is {v:.6g}"
    return fn


def _lambda0_check(key):
    def fn(ctx):
        rep = _cheeger(key)
        target = rep.H**2 / 4.0
        rel = abs(rep.lambda0_extrapolated / target - 1.0)
        return rel, 0.02, (f"extrapolated λ₀ = {rep.lambda0_extrapolated:.8g}"
                           f" vs H²/4 = {target:.8g}")
    return fn


for _key in ("h3", "dr21", "dr11"):
    _check(f"growth_rate_{_key}", 10)(_growth_rate_check(_key))
    _check(f"volume_ratio_{_key}", 10)(_volume_ratio_check(_key))
    _check(f"spectral_bottom_{_key}", 10)(_lambda0_check(_key))


# ---------------------------------------------------------------------------
# criterion 11: non-radial identities on explicit 2D spaces
# ---------------------------------------------------------------------------

@_check("displacement_identity_plane", 11)
def _disp_plane(ctx):
    pl = geometry.make_plane()
    res = geometry.displacement_identity_check(
        pl, 1.0, np.array([1.5, 0.7]), np.linspace(0.2, 3.0, 8))
    return res, 1e-8, "circle averages of the shifted eigenfunction (λ = 1)"


@_check("displacement_identity_h2", 11)
def _disp_h2(ctx):
    h2 = geometry.make_hyperbolic_plane()
    x = h2.sphere_param(h2.origin, 1.0, 0.0)
    res = geometry.displacement_identity_check(h2, 1.0, x, np.array([1.0]))
    return res, 1e-6, "hyperbolic displacement identity at |x| = 1, r = 1"


@_check("projector_commutes_plane", 11)
def _commute_plane(ctx):
    pl = geometry.make_plane()
    res = geometry.projector_convolution_check(
        pl, 1.0, lambda p: np.exp(p[:, 0]))
    return res, 1e-6, "π(T_r * f) = T_r * (π f) for f = eˣ at r = 1"


@_check("projector_commutes_h2", 11)
def _commute_h2(ctx):
    h2 = geometry.make_hyperbolic_plane()
    f = geometry.bump_patch(h2, h2.sphere_param(h2.origin, 0.7, 0.4), 1.1)
    res = geometry.projector_convolution_check(h2, 1.0, f)
    return res, 1e-6, "projector/translation commutation on H²"


@_check("projector_selfadjoint", 11)
def _selfadjoint(ctx):
    rng = np.random.default_rng(ctx["seed"])
    pl = geometry.make_plane()
    c1 = pl.sphere_param(pl.origin, 0.9, rng.uniform(0.0, 2 * math.pi))
    c2 = pl.sphere_param(pl.origin, 1.4, rng.uniform(0.0, 2 * math.pi))
    f = geometry.bump_patch(pl, c1, 1.0)
    g = geometry.bump_patch(pl, c2, 1.2)
    res = geometry.projector_selfadjoint_check(pl, f, g, 3.2)
    return res, 1e-6, "⟨πf, g⟩ = ⟨f, πg⟩ for random off-center bumps"


@_check("projector_idempotent", 11)
def _idempotent(ctx):
    pl = geometry.make_plane()
    h2 = geometry.make_hyperbolic_plane()
    r1 = geometry.idempotence_check(pl, lambda p: np.exp(p[:, 0]))
    fh = geometry.bump_patch(h2, h2.sphere_param(h2.origin, 0.7, 0.4), 1.1)
    r2 = geometry.idempotence_check(h2, fh)
    return max(r1, r2), 1e-10, "π² = π on both explicit spaces"


# ---------------------------------------------------------------------------
# criterion 12: convergence orders
# ---------------------------------------------------------------------------

def _wave_exact_error(key, dr):
    model = _model(key)
    prof = profiles.gauss_bump(0.5)
    states = pde.radial_wave_solve(model, prof, 2.0, dt=0.4 * dr, dr=dr)
    st = states[-1]
    r, t = st.grid.points, st.t
    if key == "e0":
        exact = (prof.f(np.abs(r - t)) + prof.f(r + t)) / 2.0
    else:
        def psi(x):
            return x * prof.f(np.abs(x))
        with np.errstate(invalid="ignore", divide="ignore"):
            exact = (psi(r - t) + psi(r + t)) / (2.0 * r)
        h = 1e-6
        exact[0] = (psi(t + h) - psi(t - h)) / (2.0 * h)
    return float(np.max(np.abs(st.u - exact)))


def _wave_order_check(key):
    def fn(ctx):
        coarse = _wave_exact_error(key, 0.02)
        fine = _wave_exact_error(key, 0.01)
        ratio = coarse / fine
        return ratio, 3.5, (f"d'Alembert-oracle error {coarse:.3e} → "
                            f"{fine:.3e} under mesh halving"), ">="
    return fn


_check("wave_order_e0", 12)(_wave_order_check("e0"))
_check("wave_order_e2", 12)(_wave_order_check("e2"))


@_check("heat_order", 12)
def _heat_order(ctx):
    lams = np.linspace(0.0, 2.0, 9)
    coarse = pde.heat_identity_check(_model("e0"), 0.5, lams, dr=0.02)
    fine = pde.heat_identity_check(_model("e0"), 0.5, lams, dr=0.01)
    return coarse / fine, 3.5, (
        f"multiplier-identity error {coarse:.3e} → {fine:.3e} "
        "under mesh halving"), ">="


@_check("kg_quadrature_order", 12)
def _kg_order(ctx):
    g = _gauss_line(0.12, 3.0)
    ref = pde.kg_solve(3.0, g, 2.0, sigma_panels=256, s_max=7.0)
    errs = []
    for p in (32, 64):
        v = pde.kg_solve(3.0, g, 2.0, sigma_panels=p, s_max=7.0)
        errs.append(float(np.max(np.abs(v.values - ref.values))))
    return errs[0] / errs[1], 4.0, (
        f"kernel-integral error {errs[0]:.3e} → {errs[1]:.3e} when the "
        "σ panel count doubles"), ">="


@_check("displacement_quadrature_order", 12)
def _disp_order(ctx):
    h2 = geometry.make_hyperbolic_plane()
    x = h2.sphere_param(h2.origin, 2.0, 0.7)
    rg = np.linspace(0.5, 3.0, 6)
    errs = [geometry.displacement_identity_check(h2, 8.0, x, rg, quad_order=N)
            for N in (64, 128)]
    return errs[0] / errs[1], 4.0, (
        f"residual {errs[0]:.3e} → {errs[1]:.3e} when the angular "
        "order doubles"), ">="


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

def _run_one(check, ctx):
    t0 = time.perf_counter()
    try:
        out = check.fn(ctx)
        comparison = "<="
        if len(out) == 4:
            measured, bound, detail, comparison = out
        else:
            measured, bound, detail = out
        if comparison == "<=":
            passed = bool(measured <= bound)
        else:
            passed = bool(measured >= bound)
    except Exception:
        measured, bound, comparison = float("nan"), float("nan"), "<="
        passed = False
        detail = "raised: " + traceback.format_exc(limit=3).strip()
    return CheckResult(check.name, check.criterion, passed,
                       float(measured), float(bound), comparison, detail,
                       time.perf_counter() - t0)


def run_suite(quick=False, seed=DEFAULT_SEED, threads=None, progress=None):
    """Run the registered battery; returns a SuiteReport.

    threads defaults to the HARMONIC_THREADS environment variable (1 if
    unset).  progress, if given, is called with each CheckResult as it
    completes.
    """
    if threads is None:
        threads = int(os.environ.get("HARMONIC_THREADS", "1"))
    threads = max(1, threads)
    picks = registered_checks(quick=quick)
    ctx = {"seed": int(seed), "quick": quick}

    results = {}

    def finish(check, res):
        results[check.name] = res
        if progress is not None:
            progress(res)

    if threads == 1:
        for c in picks:
            finish(c, _run_one(c, ctx))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = {pool.submit(_run_one, c, ctx): c for c in picks}
            for fut, c in futs.items():
                finish(c, fut.result())

    ordered = tuple(results[c.name] for c in picks)
    return SuiteReport(checks=ordered, quick=quick, seed=int(seed))
