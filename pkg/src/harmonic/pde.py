"""Wave, Klein-Gordon, and heat flows for radial data.

Three solvers share the radial Laplacian Δw = w'' + (θ'/θ) w'.  The wave
flow is advanced by an explicit leapfrog scheme, the heat flow implicitly
on the flux form (so the discrete mass is conserved exactly), and the
Klein-Gordon problem on the line is assembled from the d'Alembert average
plus a smoothing kernel W(t, s) that is entire in t² - s².

The checks in this module tie the flows together: the line picture of the
radial wave flow solves Klein-Gordon, the transform intertwines the radial
Laplacian with d²/ds² - H²/4, and the heat flow acts spectrally as the
multiplier e^{-(λ² + H²/4) t}.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from .grids import Grid1D, make_grid
from .profiles import RadialProfile, smooth_bump
from .transforms import (EvenLineFunction, RadialFunction, _as_radial, abel,
                         abel_second_derivative, spherical_fourier)

# the kernel series alternates; beyond H*t = 40 it cancels away more
# digits than double precision has to spare
KG_HT_CAP = 40.0
_SERIES_MAX_TERMS = 600


# ---------------------------------------------------------------------------
# Klein-Gordon smoothing kernel
# ---------------------------------------------------------------------------

def _check_kg_args(H, t):
    if H < 0:
        raise ValueError("H must be nonnegative")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if H * t > KG_HT_CAP:
        raise ValueError(
            f"H*t = {H * t:.4g} exceeds the supported range {KG_HT_CAP:g}: "
            "the kernel series loses too many digits to cancellation there")


def _kg_series(H, t, s, want_dt):
    """Partial sums S0 = Σ c^{k+1} u^k / (k!(k+1)!) and S1 = dS0/du.

    u = t² - s², c = -H²/16.  W = t S0 and W_t = S0 + 2t² S1.  Terms are
    accumulated until they fall below 1e-16 of the running sum.
    """
    _check_kg_args(H, t)
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    if np.any(np.abs(s) > t * (1.0 + 1e-12) + 1e-12):
        raise ValueError("kernel is only defined on |s| <= t")
    u = np.maximum(t * t - s * s, 0.0)
    c = -(H * H) / 16.0
    term = np.full_like(u, c)
    s0 = term.copy()
    s1 = None
    dterm = None
    if want_dt:
        dterm = np.full_like(u, c * c / 2.0)
        s1 = dterm.copy()
    for k in range(1, _SERIES_MAX_TERMS):
        term = term * (c / (k * (k + 1))) * u
        s0 += term
        done = float(np.max(np.abs(term))) <= 1e-16 * max(
            float(np.max(np.abs(s0))), 1e-30)
        if want_dt:
            dterm = dterm * (c / (k * (k + 2))) * u
            s1 += dterm
            done = done and float(np.max(np.abs(dterm))) <= 1e-16 * max(
                float(np.max(np.abs(s1))), 1e-30)
        if done:
            break
    else:
        raise RuntimeError("kernel series failed to converge")
    w = t * s0
    wt = (s0 + 2.0 * t * t * s1) if want_dt else None
    if scalar:
        return float(w[0]), (float(wt[0]) if want_dt else None)
    return w, wt


def kg_kernel(H, t, s):
    """Smoothing kernel W(t, s) of the Klein-Gordon propagator.

    W(t, s) = t Σ_k (-H²/16)^{k+1} (t² - s²)^k / (k! (k+1)!), even in s,
    with W(t, t) = -H² t / 16 on the light cone.
    """
    w, _ = _kg_series(H, t, s, want_dt=False)
    return w


def kg_kernel_dt(H, t, s):
    """∂W/∂t by term-by-term differentiation of the kernel series."""
    _, wt = _kg_series(H, t, s, want_dt=True)
    return wt


@dataclass(frozen=True)
class KGKernel:
    """Evaluator for W(t, s) at fixed H."""

    H: float

    def __call__(self, t, s):
        return kg_kernel(self.H, t, s)

    def dt(self, t, s):
        return kg_kernel_dt(self.H, t, s)


# ---------------------------------------------------------------------------
# Klein-Gordon evolution on the line
# ---------------------------------------------------------------------------

def kg_solve(H, g, t, s_spacing=None, sigma_spacing=0.03, s_max=None,
             sigma_panels=None):
    """Evolve v_tt = v_ss - (H²/4) v from v(0) = g, v_t(0) = 0.

    v(t, s) = (g(s-t) + g(s+t))/2 + ∫_{-t}^{t} W(t, σ) g(s-σ) dσ, so the
    support is exactly supp(g) + [-t, t].  The slope and velocity come from
    the same formula differentiated analytically; info carries the velocity
    samples and the conserved energy ∫ v_s² + v_t² + (H²/4) v² ds.
    Pass s_max to put solutions at different times on a common grid.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    t = float(t)
    support = g.support + t
    if s_spacing is None:
        s_spacing = min(0.02, 2.0 * float(g.grid.points[1] - g.grid.points[0]))
    if s_max is None:
        s_max = support + 0.5
    sgrid = make_grid(s_max, spacing=s_spacing)
    quarter = H * H / 4.0

    if t > 0:
        # a fixed panel count makes the quadrature error vary smoothly in t,
        # which matters when callers difference solutions across times
        qgrid = make_grid(t, n_panels=sigma_panels, spacing=sigma_spacing)
        sig = qgrid.nodes
        w_here, wt_here = _kg_series(H, t, sig, want_dt=True)
        w_quad = qgrid.node_weights * w_here
        wt_quad = qgrid.node_weights * wt_here
        edge = kg_kernel(H, t, t)
    else:
        sig = w_quad = wt_quad = None
        edge = 0.0

    def assemble(points):
        gm = g(points - t)
        gp = g(points + t)
        dm = g.derivative(points - t)
        dp = g.derivative(points + t)
        v = 0.5 * (gm + gp)
        vs = 0.5 * (dm + dp)
        vt = 0.5 * (dp - dm) + edge * (gm + gp)
        if t > 0:
            folded = g(points[:, None] - sig) + g(points[:, None] + sig)
            v = v + folded @ w_quad
            vt = vt + folded @ wt_quad
            dfold = (g.derivative(points[:, None] - sig)
                     + g.derivative(points[:, None] + sig))
            vs = vs + dfold @ w_quad
        return v, vs, vt

    vp, vsp, vtp = assemble(sgrid.points)
    vn, vsn, vtn = assemble(sgrid.nodes)
    energy = 2.0 * float(sgrid.integrate(vsn**2 + vtn**2 + quarter * vn**2))
    info = {"H": H, "t": t, "energy": energy,
            "vt_values": vtp, "vt_node_values": vtn}
    return EvenLineFunction(grid=sgrid, values=vp, support=support,
                            deriv_values=vsp, exact_node_values=vn, info=info)


def kg_energy(v):
    """Conserved energy of a kg_solve output."""
    return v.info["energy"]


# ---------------------------------------------------------------------------
# radial wave flow
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WaveState:
    """One time slice of the radial wave flow."""

    t: float
    grid: Grid1D
    u: np.ndarray
    u_t: np.ndarray
    model: object
    support: float


def _radial_data(q0):
    if isinstance(q0, RadialProfile):
        return q0.f, q0.support
    if isinstance(q0, RadialFunction):
        return q0.__call__, q0.support_radius
    raise TypeError("expected RadialFunction or RadialProfile")


def _numerical_support(u, r, floor_rel):
    # threshold relative to the current slice, so fronts whose amplitude
    # decays (spreading, damping) are still tracked
    a = np.abs(u)
    peak = float(np.max(a))
    if peak == 0.0:
        return 0.0
    hot = np.nonzero(a > floor_rel * peak)[0]
    return float(r[hot[-1]]) if hot.size else 0.0


def radial_wave_solve(model, q0, T, dt, dr=None, r_max=None, n_samples=9,
                      support_floor=3e-4):
    """Leapfrog trajectory of w_tt = w_rr + (θ'/θ) w_r with w_t(0) = 0.

    The origin is handled by the even-extension ghost point together with
    the removable-singularity form (n+1) w_rr of the radial Laplacian at
    r = 0.  Refuses when dt violates the CFL bound 0.5 dr, or when the unit
    light cone from supp(q0) would touch the artificial wall at r_max.
    """
    fn, support = _radial_data(q0)
    dt = float(dt)
    if dt <= 0 or T < 0:
        raise ValueError("need T >= 0 and dt > 0")
    if dr is None:
        dr = 2.5 * dt
    if dt > 0.5 * dr * (1.0 + 1e-12):
        raise ValueError(
            f"CFL violation: dt = {dt:g} exceeds 0.5 dr = {0.5 * dr:g}")
    if r_max is None:
        r_max = support + T + 1.0
    margin = max(0.2, 5.0 * dr)
    if support + T > r_max - margin:
        raise ValueError(
            "light cone reaches the wall: need r_max >= "
            f"{support + T + margin:.4g}")
    m_cells = int(math.ceil(r_max / dr))
    grid = make_grid(m_cells * dr, n_panels=m_cells)
    r = grid.points
    n = model.n
    dlog = model.dlog_theta(r[1:-1])
    inv_dr2 = 1.0 / (dr * dr)
    half_inv = 0.5 / dr

    def apply_lap(w):
        out = np.empty_like(w)
        out[0] = 2.0 * (n + 1) * (w[1] - w[0]) * inv_dr2
        out[1:-1] = ((w[2:] - 2.0 * w[1:-1] + w[:-2]) * inv_dr2
                     + dlog * (w[2:] - w[:-2]) * half_inv)
        out[-1] = 0.0           # Dirichlet wall, never reached by the cone
        return out

    w_prev = np.asarray(fn(r), dtype=float)
    w_cur = w_prev + 0.5 * dt * dt * apply_lap(w_prev)
    n_steps = max(1, int(math.ceil(T / dt - 1e-9)))
    sample_steps = sorted({int(round(x))
                           for x in np.linspace(0.0, n_steps, n_samples)})
    states = []
    if sample_steps and sample_steps[0] == 0:
        states.append(WaveState(
            0.0, grid, w_prev.copy(), np.zeros_like(w_prev), model,
            _numerical_support(w_prev, r, support_floor)))
    wanted = set(sample_steps)
    for m in range(1, n_steps + 1):
        w_next = 2.0 * w_cur - w_prev + dt * dt * apply_lap(w_cur)
        if m in wanted:
            u_t = (w_next - w_prev) * (0.5 / dt)
            states.append(WaveState(
                m * dt, grid, w_cur.copy(), u_t, model,
                _numerical_support(w_cur, r, support_floor)))
        w_prev, w_cur = w_cur, w_next
    return states


def support_growth_slope(states, t_min=0.5):
    """Least-squares slope of the numerical support radius against time."""
    ts = np.array([st.t for st in states])
    rs = np.array([st.support for st in states])
    keep = ts >= t_min
    if np.count_nonzero(keep) < 2:
        raise ValueError("not enough samples past t_min for a slope")
    return float(np.polyfit(ts[keep], rs[keep], 1)[0])


# ---------------------------------------------------------------------------
# intertwining and the wave correspondence
# ---------------------------------------------------------------------------

def intertwine_check(model, f):
    """Sup-residual of A(Δf) = (d²/ds² - H²/4) A f.

    f must be a RadialProfile: Δf is formed from its analytic derivatives
    through the polar formula, keeping differentiation error out of the
    comparison.  Both transforms go through the spectral route, and the
    second derivative of A f reuses the stored spectral samples.
    """
    if not isinstance(f, RadialProfile):
        raise TypeError("intertwine_check needs a RadialProfile")
    rf = RadialFunction.from_profile(model, f)
    lap = f.laplacian(model)
    rlap = RadialFunction(model=model, grid=rf.grid,
                          values=lap(rf.grid.points),
                          support_radius=f.support,
                          exact_node_values=lap(rf.grid.nodes))
    # both transforms share one spectral cutoff: the identity holds at any
    # truncation level, and a common grid keeps tail effects out of it
    lam_c = max(40.0 / f.support, 8.0)
    pinned = dict(lambda_max=lam_c, max_lambda_factor=1.0, strict_tail=False)
    a_f = abel(model, rf, **pinned)
    a_lap = abel(model, rlap, s_max=a_f.grid.x_max, **pinned)
    d2 = abel_second_derivative(a_f)
    quarter = model.H ** 2 / 4.0
    resid = a_lap.values - (d2 - quarter * a_f.values)
    return float(np.max(np.abs(resid)))


def wave_to_kg_check(model, q0, T, dt=0.002, n_checks=3):
    """Max gap between the transported wave flow and the line evolution.

    The radial wave trajectory from q0 is pushed to the line by the
    transform at a few sample times and compared against the Klein-Gordon
    solution started from A q0.  Returns the worst sup-norm gap.
    """
    rf = _as_radial(model, q0)
    states = radial_wave_solve(model, rf, T, dt, n_samples=n_checks + 1)
    g0 = abel(model, rf)
    worst = 0.0
    for st in states:
        if st.t <= 0:
            continue
        fw = RadialFunction(model=model, grid=st.grid, values=st.u,
                            support_radius=min(st.support + 0.1,
                                               st.grid.x_max))
        # FD samples carry O(dr^2) noise, so the spectral tail flattens
        # around it; cap the cutoff instead of chasing decay
        a_w = abel(model, fw, s_max=st.support + 0.5, tail_tol=1e-8,
                   strict_tail=False)
        v = kg_solve(model.H, g0, st.t)
        gap = np.abs(a_w.values - v(a_w.grid.points))
        worst = max(worst, float(np.max(gap)))
    return worst


# ---------------------------------------------------------------------------
# radial heat flow
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeatState:
    """Cell-centered heat profile at one time."""

    t: float
    grid: Grid1D
    k: np.ndarray
    bump_width: float
    mass: float

    @property
    def r(self):
        """Cell centers; k[i] lives at r[i]."""
        p = self.grid.points
        return 0.5 * (p[:-1] + p[1:])


class BoundaryLeakError(RuntimeError):
    """Heat mass reached the artificial wall; enlarge the domain."""

    def __init__(self, msg, required_r_max=None):
        super().__init__(msg)
        self.required_r_max = required_r_max


def radial_heat_solve(model, t_final, bump_width, dr=0.01, dt=None,
                      r_max=None, n_samples=9, leak_tol=1e-10):
    """Crank-Nicolson trajectory of k_t = k_rr + (θ'/θ) k_r from a bump.

    Discretized in flux form on cell centers, d/dt (θ_i k_i Δr) =
    F_{i+1/2} - F_{i-1/2} with F = θ(face) Δk/Δr and zero flux at both
    walls, so the total mass ω_n Σ θ_i k_i Δr is conserved to roundoff.
    The first two steps are split into backward-Euler halves to damp the
    startup transient.  Initial datum: a smooth bump scaled to mass one.
    """
    if t_final <= 0 or t_final > 5.0:
        raise ValueError("t_final must lie in (0, 5]")
    if bump_width < 3.0 * dr:
        raise ValueError("bump_width must be at least 3 dr")
    if dt is None:
        dt = 0.5 * dr
    spread = model.H * t_final + 10.0 * math.sqrt(t_final) + 2.0
    if r_max is None:
        r_max = bump_width + spread
    m_cells = int(math.ceil(r_max / dr))
    grid = make_grid(m_cells * dr, n_panels=m_cells)
    faces = grid.points
    centers = 0.5 * (faces[:-1] + faces[1:])
    theta_c = model.theta(centers)
    flux = model.theta(faces) / dr
    flux[0] = flux[-1] = 0.0

    # D k = (flux[i+1](k[i+1]-k[i]) - flux[i](k[i]-k[i-1])) / (theta_c dr)
    denom = theta_c * dr
    lower = flux[:-1] / denom          # coefficient of k[i-1]
    upper = flux[1:] / denom           # coefficient of k[i+1]
    diag = -(flux[:-1] + flux[1:]) / denom

    def banded_lhs(c):
        ab = np.zeros((3, m_cells))
        ab[0, 1:] = -c * upper[:-1]
        ab[1, :] = 1.0 - c * diag
        ab[2, :-1] = -c * lower[1:]
        return ab

    def rhs_mul(c, k):
        out = (1.0 + c * diag) * k
        out[:-1] += c * upper[:-1] * k[1:]
        out[1:] += c * lower[1:] * k[:-1]
        return out

    prof = smooth_bump(bump_width)
    k = np.asarray(prof.f(centers), dtype=float)
    mass0 = model.sphere_const * float(np.sum(theta_c * k)) * dr
    k /= mass0

    def mass_of(kv):
        return model.sphere_const * float(np.sum(theta_c * kv)) * dr

    n_steps = max(4, int(math.ceil(t_final / dt - 1e-9)))
    dt_eff = t_final / n_steps
    # schedule: two Rannacher steps as backward-Euler halves, then CN;
    # both use the same left-hand matrix I - (dt_eff/2) D
    schedule = [("be", 0.5 * dt_eff)] * 4 + [("cn", dt_eff)] * (n_steps - 2)
    lhs = banded_lhs(0.5 * dt_eff)

    times = np.cumsum([s[1] for s in schedule])
    sample_times = np.linspace(0.0, t_final, n_samples)
    record = set()
    for st_t in sample_times[1:]:
        record.add(int(np.argmin(np.abs(times - st_t))))

    states = [HeatState(0.0, grid, k.copy(), bump_width, mass_of(k))]
    for j, (kind, step) in enumerate(schedule):
        if kind == "be":
            k = solve_banded((1, 1), lhs, k)
        else:
            k = solve_banded((1, 1), lhs, rhs_mul(0.5 * dt_eff, k))
        if j in record:
            states.append(HeatState(float(times[j]), grid, k.copy(),
                                    bump_width, mass_of(k)))

    tail = model.sphere_const * float(np.sum(theta_c[-3:] * k[-3:])) * dr
    if tail > leak_tol:
        needed = max(bump_width + 1.6 * spread, 1.5 * grid.x_max)
        raise BoundaryLeakError(
            f"mass {tail:.3g} in the last cells exceeds {leak_tol:g}; "
            f"rerun with r_max >= {needed:.4g}", required_r_max=needed)
    return states


def _cells_to_radial(model, state):
    """Radial container over the heat grid, interpolating cell centers."""
    rc = state.r
    xs = np.concatenate([-rc[::-1], rc])
    ys = np.concatenate([state.k[::-1], state.k])
    spl = CubicSpline(xs, ys)
    g = state.grid
    return RadialFunction(model=model, grid=g, values=spl(g.points),
                          support_radius=g.x_max,
                          exact_node_values=spl(g.nodes))


def heat_identity_check(model, t, lambdas, bump_width=0.3, dr=0.01, dt=None,
                        guard=1e-3):
    """Max relative gap between the heat flow and its spectral multiplier.

    Evolving a bump b for time t multiplies its transform pointwise:
    F(k(t))(λ) = e^{-(λ² + H²/4) t} F(b)(λ).  Both transforms use the same
    cell data, so the discretization of b cancels in the ratio.  λ values
    where |F b| <= guard are refused (the quotient would amplify noise).
    """
    lambdas = np.asarray(lambdas, dtype=float)
    states = radial_heat_solve(model, t, bump_width, dr=dr, dt=dt,
                               n_samples=2)
    f_end = spherical_fourier(model, _cells_to_radial(model, states[-1]),
                              lambdas).values
    f_start = spherical_fourier(model, _cells_to_radial(model, states[0]),
                                lambdas).values
    weak = np.abs(f_start) <= guard
    if np.any(weak):
        ok = lambdas[~weak]
        cap = f"{np.max(ok):.4g}" if ok.size else "none"
        raise ValueError(
            f"|F bump| <= {guard:g} at λ = {lambdas[weak][0]:.4g}; "
            f"shrink the λ grid (largest usable λ: {cap})")
    target = np.exp(-(lambdas**2 + model.H**2 / 4.0) * states[-1].t)
    if np.any(target < 1e-12):
        raise ValueError(
            "spectral multiplier underflows at the largest λ; a relative "
            "comparison there is meaningless, shrink the λ grid")
    return float(np.max(np.abs(f_end / f_start - target) / target))
