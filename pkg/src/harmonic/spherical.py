"""Radial eigenfunctions φ_λ of the Laplacian on a harmonic space.

φ_λ is the radial solution of Δφ + (λ² + H²/4) φ = 0 with φ(0) = 1, i.e.

    φ'' + (θ'/θ) φ' = L φ,      L = -(λ² + H²/4),

and two independent evaluation paths are maintained:

* a Volterra power series  φ_λ = 1 + Σ_{k≥1} a_k(r) L^k  whose coefficients
  obey the recursion

      a_0 = 1,
      a_{k+1}(r) = ∫_0^r (1/θ(r₂)) ∫_0^{r₂} θ(r₁) a_k(r₁) dr₁ dr₂,

  with the bounds 0 ≤ a_k(r) ≤ r^{2k}/(2k)! (equality iff θ is constant);

* direct integration of the ODE from a Taylor start near r = 0 (the
  coefficient θ'/θ ~ n/r is singular at the origin, so the first 10⁻³ of the
  radius is handled by the series-derived Taylor polynomial).

The two paths are cross-checked in the tests wherever the series is
numerically trustworthy.  The series in double precision carries a
cancellation floor of about eps·cosh(sqrt(|L|)·r); phi_series reports it as
`error_bound` and the `phi` dispatcher switches to the ODE path when the
floor would exceed 1e-10.

Everything is even in λ (functions of L only), entire in L, and equals 1
identically at λ = ±iH/2 (L = 0).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .grids import Grid1D, _tables, make_grid

TAYLOR_RADIUS = 1e-3
SERIES_TOL = 1e-14
SERIES_K_CAP = 160
ODE_RTOL = 1e-11
ODE_ATOL = 1e-13
_EPS = np.finfo(float).eps


class QuadratureError(RuntimeError):
    """Coefficient quadrature failed its internal bound check."""


class TruncationError(RuntimeError):
    """Requested accuracy needs more series terms than the cap allows."""

    def __init__(self, msg, required_k=None):
        super().__init__(msg)
        self.required_k = required_k


# ---------------------------------------------------------------------------
# Volterra coefficients
# ---------------------------------------------------------------------------

@dataclass
class SeriesCoefficients:
    """Samples of the Volterra coefficients a_k and their r-derivatives."""

    model: object
    grid: Grid1D
    k_max: int
    point_values: np.ndarray    # (K, P) a_k at grid.points, k = 1..K
    node_values: np.ndarray     # (K, Nq) a_k at quadrature nodes
    point_derivs: np.ndarray    # (K, P) a_k'
    node_derivs: np.ndarray


class _CoefWorkspace:
    """Incremental recursion state so k_max can grow without restart."""

    def __init__(self, model, grid):
        self.model = model
        self.grid = grid
        self.theta_nodes = model.theta(grid.nodes)
        if np.any(self.theta_nodes <= 0) or not np.all(np.isfinite(self.theta_nodes)):
            raise QuadratureError("theta not positive/finite on quadrature nodes")
        self.theta_points = model.theta(grid.points)
        self.level_nodes = []    # a_k at nodes
        self.level_points = []
        self.deriv_nodes = []
        self.deriv_points = []
        with np.errstate(divide="ignore"):
            logr_nodes = np.log(grid.nodes)
            logr_points = np.log(grid.points)
        self._logr_nodes = logr_nodes
        self._logr_points = logr_points

    def extend(self, k_max):
        while len(self.level_nodes) < k_max:
            k = len(self.level_nodes) + 1
            prev = self.level_nodes[-1] if self.level_nodes else np.ones_like(self.theta_nodes)
            inner_nodes = self.grid.cumulative_at_nodes(self.theta_nodes * prev)
            inner_points = self.grid.cumulative_at_points(self.theta_nodes * prev)
            d_nodes = inner_nodes / self.theta_nodes
            with np.errstate(divide="ignore", invalid="ignore"):
                d_points = inner_points / self.theta_points
            d_points[0] = 0.0     # a_k'(0) = 0: inner integral vanishes like theta
            a_nodes = self.grid.cumulative_at_nodes(d_nodes)
            a_points = self.grid.cumulative_at_points(d_nodes)
            self._check_bound(k, a_nodes, self._logr_nodes)
            self._check_bound(k, a_points, self._logr_points)
            self.level_nodes.append(a_nodes)
            self.level_points.append(a_points)
            self.deriv_nodes.append(d_nodes)
            self.deriv_points.append(d_points)

    def _check_bound(self, k, a, logr):
        bound = np.exp(2 * k * logr - math.lgamma(2 * k + 1))
        # cumulative quadrature carries an absolute roundoff floor relative to
        # the largest values on the level, so the pointwise check gets both a
        # relative slack and that floor
        floor = 64 * _EPS * float(np.max(np.abs(a), initial=0.0)) + 1e-250
        slack = 1e-8 * bound + floor
        if np.any(a > bound + slack) or np.any(a < -slack):
            over = float(np.max(a - bound))
            under = float(np.min(a))
            raise QuadratureError(
                f"coefficient a_{k} violates 0 <= a_k <= r^(2k)/(2k)! "
                f"(excess {over:.3e}, min {under:.3e}); refine the grid")

    def view(self, k_max):
        self.extend(k_max)
        return SeriesCoefficients(
            model=self.model, grid=self.grid, k_max=k_max,
            point_values=np.array(self.level_points[:k_max]),
            node_values=np.array(self.level_nodes[:k_max]),
            point_derivs=np.array(self.deriv_points[:k_max]),
            node_derivs=np.array(self.deriv_nodes[:k_max]),
        )


_COEF_CACHE: dict[tuple, _CoefWorkspace] = {}
# the workspace grows in place, so concurrent extend() calls would corrupt
# the recursion state; one lock serializes all access
_COEF_LOCK = threading.Lock()


def volterra_coefficients(model, grid, k_max):
    """Volterra coefficients a_1..a_{k_max} on the grid (cached per model/grid)."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    key = (model.key, grid.signature)
    with _COEF_LOCK:
        ws = _COEF_CACHE.get(key)
        if ws is None:
            ws = _COEF_CACHE[key] = _CoefWorkspace(model, grid)
        return ws.view(int(k_max))


def truncation_order(abs_L, r_max, tol=SERIES_TOL, k_cap=SERIES_K_CAP):
    """Smallest K with |L|^K r_max^{2K}/(2K)! < tol, past the term peak."""
    if abs_L == 0.0:
        return 0
    x2 = abs_L * r_max * r_max    # bound term ratio is x2/((2k+1)(2k+2))
    log_l = math.log(abs_L)
    log_r2 = 2 * math.log(r_max) if r_max > 0 else -math.inf
    for k in range(1, 2001):
        b = k * log_l + k * log_r2 - math.lgamma(2 * k + 1)
        if b < math.log(tol) and (2 * k + 1) * (2 * k + 2) > x2:
            if k > k_cap:
                raise TruncationError(
                    f"series needs K = {k} terms (cap {k_cap}) for "
                    f"|L| = {abs_L:.3g}, r_max = {r_max:.3g}", required_k=k)
            return k
    raise TruncationError(
        f"series truncation order exceeds 2000 for |L| = {abs_L:.3g}, "
        f"r_max = {r_max:.3g}", required_k=2001)


# ---------------------------------------------------------------------------
# evaluation results
# ---------------------------------------------------------------------------

@dataclass
class SphericalFunction:
    """φ_λ sampled on a radial grid, with its radial derivative."""

    model: object
    lam: complex
    L: complex
    grid: Grid1D
    values: np.ndarray
    derivative_values: np.ndarray
    method: str
    error_bound: float
    k_used: int | None = None

    def __call__(self, r):
        """Cubic-spline evaluation between the stored samples."""
        if np.iscomplexobj(self.values):
            re = self.grid.spline(self.values.real)(r)
            im = self.grid.spline(self.values.imag)(r)
            return re + 1j * im
        return self.grid.spline(self.values)(r)


def _normalize_lambda(lam):
    """Treat complex λ with zero imaginary part as real (keeps dtypes real)."""
    lam_c = complex(lam)
    if lam_c.imag == 0.0:
        return lam_c.real, True
    return lam_c, False


def spectral_shift(model, lam):
    """L = -(λ² + H²/4); the eigenvalue equation reads Δφ = L φ."""
    lam, real_input = _normalize_lambda(lam)
    L = -(lam * lam + model.H * model.H / 4.0)
    return L, real_input


def _series_sum(coeff_arrays, L, real_input, extra_log=None):
    """Sum 1 + Σ a_k L^k with per-term log-magnitude scaling.

    coeff_arrays is (K, P) of nonnegative a_k samples.  Returns (values,
    max_term) where max_term is the largest term magnitude (the cancellation
    floor is eps times that).
    """
    K, P = coeff_arrays.shape
    if K == 0:
        vals = np.ones(P)
        return (vals if real_input else vals.astype(complex)), 1.0
    k = np.arange(1, K + 1)
    absL = abs(L)
    with np.errstate(divide="ignore"):
        loga = np.log(np.maximum(coeff_arrays, 0.0))
        if extra_log is not None:
            loga = loga + extra_log
    if absL > 0:
        logmag = loga + (k * math.log(absL))[:, None]
    else:
        logmag = np.full_like(loga, -np.inf)
    mag = np.exp(logmag)
    max_term = float(np.max(mag, initial=0.0))
    if real_input:
        sign = np.sign(L) ** k if L != 0 else np.zeros(K)
        vals = 1.0 + np.sum(mag * sign[:, None], axis=0)
    else:
        phase = np.exp(1j * k * np.angle(L))
        vals = 1.0 + np.sum(mag * phase[:, None], axis=0)
    return vals, max_term


def phi_series(model, lam, grid, tol=SERIES_TOL, k_cap=SERIES_K_CAP,
               at_nodes=False):
    """φ_λ via the truncated Volterra series.

    error_bound combines the truncation tolerance with the double-precision
    cancellation floor eps·max_k |a_k L^k|.
    """
    L, real_input = spectral_shift(model, lam)
    K = truncation_order(abs(L), grid.x_max, tol=tol, k_cap=k_cap)
    if K == 0:
        P = grid.nodes.size if at_nodes else grid.points.size
        ones = np.ones(P) if real_input else np.ones(P, complex)
        zeros = np.zeros_like(ones)
        return SphericalFunction(model, lam, L, grid, ones, zeros,
                                 "series", 0.0, k_used=0)
    coeffs = volterra_coefficients(model, grid, K)
    a = coeffs.node_values if at_nodes else coeffs.point_values
    da = coeffs.node_derivs if at_nodes else coeffs.point_derivs
    vals, mx1 = _series_sum(a, L, real_input)
    derivs, mx2 = _series_sum(da, L, real_input)
    derivs = derivs - 1.0   # derivative series has no constant term
    err = _EPS * max(mx1, mx2, 1.0) + tol
    return SphericalFunction(model, lam, L, grid, vals, derivs,
                             "series", float(err), k_used=K)


# ---------------------------------------------------------------------------
# Taylor start and ODE path
# ---------------------------------------------------------------------------

def _taylor_coeffs(model, L):
    """φ ≈ 1 + A r² + B r⁴ + C r⁶ near 0, from the series recursion."""
    n = model.n
    g1 = 2.0 * model.c2
    g3 = 4.0 * model.c4 - 2.0 * model.c2**2
    A = L / (2.0 * (n + 1))
    B = A * (L - 2.0 * g1) / (4.0 * (n + 3))
    C = (L * B - 4.0 * B * g1 - 2.0 * A * g3) / (6.0 * (n + 5))
    # and the L-derivatives, for the variational equation
    A_L = np.ones_like(np.asarray(L)) / (2.0 * (n + 1))
    B_L = (A_L * (L - 2.0 * g1) + A) / (4.0 * (n + 3))
    C_L = (B + L * B_L - 4.0 * B_L * g1 - 2.0 * A_L * g3) / (6.0 * (n + 5))
    return (A, B, C), (A_L, B_L, C_L)


def _taylor_eval(coeffs, r):
    A, B, C = coeffs
    r = np.asarray(r)
    r2 = r * r
    u = 1.0 + (A[..., None] + (B[..., None] + C[..., None] * r2) * r2) * r2
    v = (2.0 * A[..., None] + (4.0 * B[..., None] + 6.0 * C[..., None] * r2) * r2) * r
    return u, v


def _taylor_eval_dL(coeffs_L, r):
    A_L, B_L, C_L = coeffs_L
    r = np.asarray(r)
    r2 = r * r
    p = (A_L[..., None] + (B_L[..., None] + C_L[..., None] * r2) * r2) * r2
    q = (2.0 * A_L[..., None] + (4.0 * B_L[..., None] + 6.0 * C_L[..., None] * r2) * r2) * r
    return p, q


def phi_ode_values(model, lams, r_points, rtol=ODE_RTOL, atol=ODE_ATOL):
    """Integrate the eigenfunction ODE for a batch of λ simultaneously.

    Returns (values, derivatives) with shape (len(lams), len(r_points)).
    r_points must be sorted ascending.
    """
    lams = np.atleast_1d(np.asarray(lams))
    real_input = not np.iscomplexobj(lams) or np.all(lams.imag == 0)
    if real_input:
        lams = lams.real.astype(float)
    H = model.H
    L = -(lams * lams + H * H / 4.0)
    M = L.size
    r_points = np.asarray(r_points, dtype=float)
    if r_points.ndim != 1 or np.any(np.diff(r_points) < 0):
        raise ValueError("r_points must be a sorted 1-d array")
    if r_points.size and r_points[0] < 0:
        raise ValueError("radii must be nonnegative")

    taylor, taylor_L = _taylor_coeffs(model, L)
    dtype = float if real_input else complex
    values = np.empty((M, r_points.size), dtype=dtype)
    derivs = np.empty_like(values)

    small = r_points <= TAYLOR_RADIUS
    if np.any(small):
        u, v = _taylor_eval(taylor, r_points[small])
        values[:, small] = u
        derivs[:, small] = v
    if np.any(~small):
        r_eval = r_points[~small]
        u0, v0 = _taylor_eval(taylor, TAYLOR_RADIUS)
        y0 = np.concatenate([u0[:, 0], v0[:, 0]]).astype(dtype)
        dlog = model.dlog_theta

        def rhs(r, y):
            u, v = y[:M], y[M:]
            return np.concatenate([v, L * u - dlog(r) * v])

        # t_eval must be strictly increasing and unique
        r_unique, inverse = np.unique(r_eval, return_inverse=True)
        sol = solve_ivp(rhs, (TAYLOR_RADIUS, r_unique[-1]), y0,
                        method="DOP853", rtol=rtol, atol=atol,
                        t_eval=r_unique, dense_output=False)
        if not sol.success:
            raise RuntimeError(f"eigenfunction ODE integration failed: {sol.message}")
        values[:, ~small] = sol.y[:M][:, inverse]
        derivs[:, ~small] = sol.y[M:][:, inverse]
    return values, derivs


def phi_ode(model, lam, grid, rtol=ODE_RTOL, atol=ODE_ATOL):
    """φ_λ on grid.points via the ODE path."""
    L, _ = spectral_shift(model, lam)
    vals, derivs = phi_ode_values(model, [lam], grid.points, rtol=rtol, atol=atol)
    scale = float(np.max(np.abs(vals)))
    err = rtol * max(scale, 1.0) * 10 + atol
    return SphericalFunction(model, lam, L, grid, vals[0], derivs[0],
                             "ode", err, k_used=None)


def phi(model, lam, grid, method="auto", tol=SERIES_TOL):
    """φ_λ by the best available path.

    'auto' uses the series when its cancellation floor is below 1e-10 and the
    ODE integrator otherwise.  Both paths agree (tested) where they overlap.
    """
    if method == "series":
        return phi_series(model, lam, grid, tol=tol)
    if method == "ode":
        return phi_ode(model, lam, grid)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    L, _ = spectral_shift(model, lam)
    x = math.sqrt(abs(L)) * grid.x_max
    if _EPS * math.cosh(min(x, 700.0)) < 1e-10:
        try:
            return phi_series(model, lam, grid, tol=tol)
        except TruncationError:
            pass
    return phi_ode(model, lam, grid)


# ---------------------------------------------------------------------------
# λ-derivatives and the integrated eigenfunction
# ---------------------------------------------------------------------------

def phi_lambda_derivative(model, lam, k, grid, tol=SERIES_TOL):
    """∂^k φ_λ / ∂λ^k on grid.points, term-wise from the series (k ≤ 4).

    Chain rule through L(λ) = -(λ² + H²/4): L' = -2λ, L'' = -2, higher
    derivatives vanish, so Faa di Bruno terminates quickly.
    """
    if not 1 <= k <= 4:
        raise ValueError("k must be between 1 and 4")
    L, real_input = spectral_shift(model, lam)
    lam_n, _ = _normalize_lambda(lam)
    K = truncation_order(abs(L), grid.x_max, tol=tol) + 12
    K = min(K, SERIES_K_CAP + 12)
    coeffs = volterra_coefficients(model, grid, K)
    a = coeffs.point_values

    # f_m = Σ_j a_j j!/(j-m)! L^{j-m}  (the m-th L-derivative of the series)
    def f_m(m):
        j = np.arange(1, K + 1)
        sel = j >= m
        jj = j[sel]
        fall = np.exp(np.array([math.lgamma(x + 1) - math.lgamma(x - m + 1) for x in jj]))
        with np.errstate(divide="ignore"):
            loga = np.log(np.maximum(a[sel], 0.0))
        absL = abs(L)
        if absL > 0:
            logmag = loga + ((jj - m) * math.log(absL))[:, None] + np.log(fall)[:, None]
            mag = np.exp(logmag)
            if real_input:
                ph = np.sign(L) ** (jj - m)
            else:
                ph = np.exp(1j * (jj - m) * np.angle(L))
            total = np.sum(mag * ph[:, None], axis=0)
            floor = float(np.max(mag, initial=0.0))
        else:
            # only j == m contributes: L^0 = 1
            total = np.zeros(a.shape[1], dtype=float if real_input else complex)
            if m <= K:
                total = a[m - 1] * math.factorial(m)
            floor = float(np.max(np.abs(total), initial=0.0))
        return total, floor

    g1 = -2.0 * lam_n   # dL/dλ
    if k == 1:
        f1, fl = f_m(1)
        out = f1 * g1
    elif k == 2:
        f1, fl1 = f_m(1)
        f2, fl2 = f_m(2)
        out = f2 * g1 * g1 - 2.0 * f1
        fl = max(fl1, fl2)
    elif k == 3:
        f2, fl2 = f_m(2)
        f3, fl3 = f_m(3)
        out = f3 * g1**3 + 3.0 * f2 * g1 * (-2.0)
        fl = max(fl2, fl3)
    else:
        f2, fl2 = f_m(2)
        f3, fl3 = f_m(3)
        f4, fl4 = f_m(4)
        out = f4 * g1**4 + 6.0 * f3 * g1 * g1 * (-2.0) + 3.0 * f2 * 4.0
        fl = max(fl2, fl3, fl4)
    if real_input and np.iscomplexobj(out):
        out = out.real
    return out


def capital_phi(model, lam, grid, method="auto"):
    """Φ_λ(r) = ∫_0^r θ φ_λ dρ at grid.points.

    Φ_{iH/2}(r) recovers vol B_r / ω_n; zeros of Φ_λ(r) in L are the
    eigenvalue data of the Dirichlet ball problem.
    """
    L, real_input = spectral_shift(model, lam)
    x = math.sqrt(abs(L)) * grid.x_max
    if method == "series" or (method == "auto"
                              and _EPS * math.cosh(min(x, 700.0)) < 1e-10):
        sf = phi_series(model, lam, grid, at_nodes=True)
        node_vals = sf.values
    else:
        node_vals, _ = phi_ode_values(model, [lam], grid.nodes)
        node_vals = node_vals[0]
    theta_nodes = model.theta(grid.nodes)
    return grid.cumulative_at_points(theta_nodes * node_vals)


# ---------------------------------------------------------------------------
# batched state evaluation in the L-plane (used by the zero search)
# ---------------------------------------------------------------------------

def eigen_state_at(model, L_values, r_stop, rtol=1e-12, atol=1e-14):
    """φ, φ_r, ∂φ/∂L, Φ, ∂Φ/∂L at radius r_stop for a batch of complex L.

    Integrates the eigenfunction ODE together with its variational equation
    (∂/∂L) and the cumulative integral Φ = ∫ θ φ.  All outputs are
    holomorphic functions of L, which is what the argument-principle zero
    search differentiates.
    """
    L = np.atleast_1d(np.asarray(L_values, dtype=complex))
    M = L.size
    if r_stop <= 0:
        raise ValueError("r_stop must be positive")
    taylor, taylor_L = _taylor_coeffs(model, L)
    r_t = min(TAYLOR_RADIUS, r_stop / 2)

    t8, w8, _, _ = _tables(8)
    qn = r_t / 2 + r_t / 2 * t8
    qw = r_t / 2 * w8
    th_q = model.theta(qn)
    u_q, _ = _taylor_eval(taylor, qn)
    p_q, _ = _taylor_eval_dL(taylor_L, qn)
    Phi0 = np.sum(qw * th_q * u_q, axis=-1)
    Psi0 = np.sum(qw * th_q * p_q, axis=-1)

    u0, v0 = _taylor_eval(taylor, r_t)
    p0, q0 = _taylor_eval_dL(taylor_L, r_t)
    y0 = np.concatenate([u0[:, 0], v0[:, 0], p0[:, 0], q0[:, 0], Phi0, Psi0])
    y0 = y0.astype(complex)

    dlog = model.dlog_theta
    theta = model.theta

    def rhs(r, y):
        u, v, p, q, _, _ = np.split(y, 6)
        c = dlog(r)
        th = theta(r)
        return np.concatenate([v, L * u - c * v,
                               q, L * p + u - c * q,
                               th * u, th * p])

    sol = solve_ivp(rhs, (r_t, r_stop), y0, method="DOP853",
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"eigen state integration failed: {sol.message}")
    u, v, p, q, Phi, Psi = np.split(sol.y[:, -1], 6)
    return {"phi": u, "dphi_dr": v, "dphi_dL": p, "Phi": Phi, "dPhi_dL": Psi}


def eigen_profile(model, L, r_max, n_samples=None, r_points=None,
                  rtol=1e-12, atol=1e-14):
    """Dense radial profile of (φ, φ_r, Φ) for one complex L.

    Used to hunt zeros in r at fixed λ.  Returns dict of arrays sampled on a
    fine uniform r-grid that resolves the oscillation scale sqrt(|L|), or on
    the explicitly supplied sorted r_points.
    """
    L = complex(L)
    if r_points is not None:
        r = np.asarray(r_points, dtype=float)
        r_max = float(r[-1])
    else:
        if n_samples is None:
            osc = math.sqrt(abs(L)) * r_max
            n_samples = int(max(400, 40 * osc / math.pi))
        r = np.linspace(0.0, r_max, n_samples + 1)
    taylor, taylor_L = _taylor_coeffs(model, np.array([L]))
    r_t = TAYLOR_RADIUS

    t8, w8, _, _ = _tables(8)
    qn = r_t / 2 + r_t / 2 * t8
    qw = r_t / 2 * w8
    u_q, _ = _taylor_eval(taylor, qn)
    Phi0 = complex(np.sum(qw * model.theta(qn) * u_q[0]))

    u0, v0 = _taylor_eval(taylor, r_t)
    y0 = np.array([u0[0, 0], v0[0, 0], Phi0], dtype=complex)
    dlog = model.dlog_theta
    theta = model.theta

    def rhs(rr, y):
        u, v, _ = y
        return np.array([v, L * u - dlog(rr) * v, theta(rr) * u])

    keep = r > r_t
    if np.any(keep):
        sol = solve_ivp(rhs, (r_t, max(r_max, float(np.max(r)))), y0,
                        method="DOP853", rtol=rtol, atol=atol, t_eval=r[keep])
        if not sol.success:
            raise RuntimeError(f"profile integration failed: {sol.message}")
    phi_v = np.empty(r.size, dtype=complex)
    dphi_v = np.empty_like(phi_v)
    Phi_v = np.empty_like(phi_v)
    u_s, v_s = _taylor_eval(taylor, r[~keep])
    phi_v[~keep] = u_s[0]
    dphi_v[~keep] = v_s[0]
    # Φ below the Taylor radius is O(r^{n+1}); quadrature on [0, r] directly
    for i, rr in enumerate(np.nonzero(~keep)[0]):
        rv = r[rr]
        if rv == 0.0:
            Phi_v[rr] = 0.0
        else:
            qn_i = rv / 2 + rv / 2 * t8
            u_i, _ = _taylor_eval(taylor, qn_i)
            Phi_v[rr] = np.sum(rv / 2 * w8 * model.theta(qn_i) * u_i[0])
    if np.any(keep):
        phi_v[keep] = sol.y[0]
        dphi_v[keep] = sol.y[1]
        Phi_v[keep] = sol.y[2]
    return {"r": r, "phi": phi_v, "dphi_dr": dphi_v, "Phi": Phi_v}


# ---------------------------------------------------------------------------
# cached real-λ bases for the transform machinery
# ---------------------------------------------------------------------------

_BASIS_CACHE: dict[tuple, np.ndarray] = {}


def phi_basis(model, lams, r_points):
    """Matrix φ_{λ_j}(r_i), shape (len(lams), len(r_points)), cached.

    The cache makes repeated transform calls against the same λ-grid and
    radial grid cheap (one vectorized ODE integration in total).
    """
    lams = np.asarray(lams, dtype=float)
    r_points = np.asarray(r_points, dtype=float)
    key = (model.key, lams.tobytes(), r_points.tobytes())
    out = _BASIS_CACHE.get(key)
    if out is None:
        vals, _ = phi_ode_values(model, lams, r_points)
        _BASIS_CACHE[key] = out = vals
    return out


def default_radial_grid(r_max, spacing=0.02):
    return make_grid(r_max, spacing=spacing)
