"""Two-radius theorems: zero sets in the L-plane and radius certification.

φ_λ(r) depends on λ only through L = -(λ² + H²/4) and is entire in L, so
zero hunting happens in the L-plane: each zero appears once instead of as a
±λ pair.  Three target functions matter:

    sphere   φ_L(r)        (sphere integrals of eigenfunctions)
    mvp      φ_L(r) - 1    (sphere mean value property)
    ball     Φ_L(r)        (ball integrals; Φ = ∫ θ φ)

A pair of radii certifies the corresponding two-radius theorem when the two
zero sets share no point.  Zeros are counted by the argument principle on
box boundaries, isolated by recursive subdivision, and polished by Newton
in L (the ODE state carries dφ/dL and dΦ/dL).  Certificates are explicitly
box-relative: the theorems quantify over all of ℂ, a search cannot.

The mvp target vanishes identically at L = 0 (φ ≡ 1 there) for every
radius; that zero is the harmonic case the theorem excludes, so a punctured
disk |L| ≤ 1e-6 is removed from every mvp count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spherical import eigen_profile, eigen_state_at

TARGETS = ("sphere", "mvp", "ball")
MVP_PUNCTURE = 1e-6
DEFAULT_ZERO_TOL = 1e-9
SEPARATION = 1e-6

# split fractions tried when a subdivision line lands on a zero
_SPLIT_FRACTIONS = (0.5, 0.45, 0.57, 0.37, 0.63, 0.41, 0.55)


class WindingError(RuntimeError):
    """Boundary winding could not be stabilized."""


@dataclass(frozen=True)
class LZero:
    L: complex
    multiplicity: int
    residual: float


@dataclass
class ZeroSet:
    model: object
    target: str
    radius: float
    box: tuple[complex, complex]
    zeros: list[LZero]
    winding_total: int
    info: dict = field(default_factory=dict)

    def values(self):
        return np.array([z.L for z in self.zeros])


@dataclass
class RadiusCertificate:
    model: object
    variant: str
    r1: float
    r2: float
    box: tuple[complex, complex]
    verdict: str
    witness: complex | None
    min_joint_residual: float
    common: list[complex]
    note: str = "certificate is box-relative: only the searched region is covered"


def _check_target(target):
    if target not in TARGETS:
        raise ValueError(f"target must be one of {TARGETS}, got {target!r}")


def _target_values(model, L_values, r, target):
    """(t(L), dt/dL) arrays for the chosen target at radius r."""
    st = eigen_state_at(model, np.asarray(L_values, dtype=complex), r)
    if target == "ball":
        return st["Phi"], st["dPhi_dL"]
    vals = st["phi"] - 1.0 if target == "mvp" else st["phi"]
    return vals, st["dphi_dL"]


# ---------------------------------------------------------------------------
# argument-principle counting
# ---------------------------------------------------------------------------

def _box_path(lo, hi, n_side):
    """Counterclockwise boundary samples, n_side per edge, closed implicitly."""
    c = [lo, complex(hi.real, lo.imag), hi, complex(lo.real, hi.imag)]
    edges = []
    for a, b in zip(c, c[1:] + c[:1]):
        edges.append(a + (b - a) * np.arange(n_side) / n_side)
    return np.concatenate(edges)


def _circle_path(center, radius, n):
    ang = 2 * np.pi * np.arange(n) / n
    return center + radius * np.exp(1j * ang)


def _winding_of_samples(t):
    """Winding number of a closed sample loop; None if sampling is too coarse."""
    ratios = np.roll(t, -1) / t
    steps = np.angle(ratios)
    if np.max(np.abs(steps)) > 0.45 * math.pi:
        return None, 0.0
    total = float(np.sum(steps)) / (2 * math.pi)
    w = round(total)
    if abs(total - w) > 0.05:
        return None, total
    return w, total


def boundary_winding(model, r, target, lo, hi, n_side=None, zero_floor=1e-11):
    """Argument-principle zero count inside the box [lo, hi].

    Raises WindingError when a boundary sample sits on (numerically) a zero
    or the phase refuses to stabilize; callers nudge the box and retry.
    """
    _check_target(target)
    if n_side is None:
        scale = max(abs(lo), abs(hi))
        n_side = int(max(32, 0.7 * r * math.sqrt(scale) + 8))
    while True:
        pts = _box_path(lo, hi, n_side)
        t, _ = _target_values(model, pts, r, target)
        if np.min(np.abs(t)) < zero_floor * max(1.0, float(np.max(np.abs(t)))):
            raise WindingError("boundary sample hits a zero")
        w, _ = _winding_of_samples(t)
        if w is not None:
            return w
        if n_side >= 2048:
            raise WindingError("phase did not stabilize at 2048 samples/side")
        n_side *= 2


_ORIGIN_CACHE: dict[tuple, int] = {}


def _origin_winding(model, r, target, radius=MVP_PUNCTURE, n=64):
    key = (model.key, float(r), target, radius)
    if key in _ORIGIN_CACHE:
        return _ORIGIN_CACHE[key]
    pts = _circle_path(0.0, radius, n)
    t, _ = _target_values(model, pts, r, target)
    w, _ = _winding_of_samples(t)
    while w is None:
        n *= 2
        if n > 1024:
            raise WindingError("puncture circle winding unstable")
        t, _ = _target_values(model, _circle_path(0.0, radius, n), r, target)
        w, _ = _winding_of_samples(t)
    _ORIGIN_CACHE[key] = w
    return w


def _box_contains(lo, hi, z, pad=0.0):
    return (lo.real - pad <= z.real <= hi.real + pad
            and lo.imag - pad <= z.imag <= hi.imag + pad)


def _punctured_winding(model, r, target, lo, hi, n_side=None):
    """Box winding with the mvp origin zero subtracted when enclosed."""
    w = boundary_winding(model, r, target, lo, hi, n_side=n_side)
    if target == "mvp" and _box_contains(lo, hi, 0j):
        w -= _origin_winding(model, r, target)
    return w


# ---------------------------------------------------------------------------
# subdivision and polishing
# ---------------------------------------------------------------------------

def _newton_polish(model, r, target, start, mult, zero_tol, max_iter=40,
                   escape=None):
    """Schroeder-modified Newton: quadratic even at multiplicity > 1.

    Bails out early when the iterate leaves an `escape` radius around the
    start or the steps stop contracting, so a hopeless start is cheap.
    """
    z = complex(start)
    prev_step = np.inf
    grew = 0
    for i in range(max_iter):
        t, dt = _target_values(model, np.array([z]), r, target)
        t, dt = complex(t[0]), complex(dt[0])
        if dt == 0:
            break
        step = mult * t / dt
        z -= step
        s = abs(step)
        if s <= 1e-14 * (1.0 + abs(z)):
            break
        if escape is not None and abs(z - start) > escape:
            break
        if s >= prev_step:
            grew += 1
            if grew >= 2 and i >= 3:
                break
        else:
            grew = 0
        prev_step = s
    t, _ = _target_values(model, np.array([z]), r, target)
    return z, abs(complex(t[0]))


def _subdivide(model, r, target, lo, hi, w, zero_tol, resolve, depth=0):
    """Recursively isolate w zeros in [lo, hi]; returns [(L, mult), ...]."""
    if w == 0:
        return []
    if w < 0:
        raise WindingError(f"negative winding {w}: boundary unstable")
    size = abs(hi - lo)
    center = (lo + hi) / 2
    at_floor = size <= resolve * (1.0 + abs(center)) or depth >= 48
    if w <= 4 or at_floor:
        # a small cluster rarely needs the box shrunk further: try Newton now,
        # fall back to subdividing if it escapes the box or stalls
        z, resid = _newton_polish(model, r, target, center, w, zero_tol,
                                  escape=max(3.0 * size, 1e-3))
        pad = max(2 * size, 1e-5 * (1 + abs(z))) if at_floor else 0.0
        good = (resid <= zero_tol and _box_contains(lo, hi, z, pad=pad)
                and not (target == "mvp" and abs(z) <= MVP_PUNCTURE))
        if good and w > 1 and not at_floor:
            # w separated simple zeros can fake a small residual at their
            # centroid; accept only if a tight box around z recounts to w
            h = 1e-5 * (1 + abs(z))
            try:
                wz = _punctured_winding(model, r, target,
                                        z - h - 1j * h, z + h + 1j * h)
            except WindingError:
                wz = -1
            good = wz == w
        if good:
            return [(z, w)]
        if at_floor:
            raise WindingError(
                f"polish from {center:.6g} failed: residual {resid:.2e}")
    wide = (hi.real - lo.real) >= (hi.imag - lo.imag)
    last_err = None
    for frac in _SPLIT_FRACTIONS:
        if wide:
            mid = lo.real + frac * (hi.real - lo.real)
            boxes = [(lo, complex(mid, hi.imag)), (complex(mid, lo.imag), hi)]
        else:
            mid = lo.imag + frac * (hi.imag - lo.imag)
            boxes = [(lo, complex(hi.real, mid)), (complex(lo.real, mid), hi)]
        try:
            counts = [_punctured_winding(model, r, target, a, b)
                      for a, b in boxes]
            if sum(counts) != w:
                raise WindingError(
                    f"child counts {counts} disagree with parent {w}")
            out = []
            for (a, b), cw in zip(boxes, counts):
                out.extend(_subdivide(model, r, target, a, b, cw,
                                      zero_tol, resolve, depth + 1))
            return out
        except WindingError as err:
            last_err = err
    raise WindingError(f"no stable split of box {lo}..{hi}: {last_err}")


def find_L_zeros(model, r, target="sphere", box=(-60 - 8j, 5 + 8j),
                 max_zeros=64, zero_tol=DEFAULT_ZERO_TOL, resolve=1e-4):
    """All zeros of the target function inside the L-plane box.

    Counts by the argument principle, isolates by subdivision, polishes by
    Newton using the analytic dφ/dL carried in the ODE state, and records
    multiplicity as the winding count of the isolating box.  For mvp the
    identically-vanishing point L = 0 is excluded by a punctured disk.
    """
    _check_target(target)
    lo, hi = complex(box[0]), complex(box[1])
    if not (lo.real < hi.real and lo.imag < hi.imag):
        raise ValueError("box corners must satisfy lo < hi componentwise")
    r = float(r)

    total = None
    corner_lo, corner_hi = lo, hi
    for attempt in range(6):
        try:
            total = _punctured_winding(model, r, target, corner_lo, corner_hi)
            break
        except WindingError:
            # nudge the outer box outward; the searched region is reported
            bump = (0.0013 * (attempt + 1)) * (abs(hi - lo) + 1.0)
            corner_lo = corner_lo - bump * (1 + 1j)
            corner_hi = corner_hi + bump * (1 + 1j)
    if total is None:
        raise WindingError("outer boundary winding unstable after nudging")
    if total > max_zeros:
        raise WindingError(f"{total} zeros counted, above max_zeros={max_zeros}")

    found = _subdivide(model, r, target, corner_lo, corner_hi, total,
                       zero_tol, resolve)
    # A multiple zero perturbed by ODE-level noise splits into a cluster of
    # radius ~sqrt(noise); points inside that radius are one zero.  Merge,
    # re-polish with the summed multiplicity, and snap conjugate-symmetric
    # clusters onto the real axis when that does not hurt the residual.
    found.sort(key=lambda zm: (zm[0].real, zm[0].imag))
    merged: list[list] = []
    for z, mlt in found:
        if merged and abs(z - merged[-1][0]) <= 1e-5 * (1.0 + abs(z)):
            tot_m = merged[-1][1] + mlt
            merged[-1][0] = (merged[-1][0] * merged[-1][1] + z * mlt) / tot_m
            merged[-1][1] = tot_m
            merged[-1][2].append(z)
        else:
            merged.append([z, mlt, [z]])
    zeros = []
    for z, mlt, members in merged:
        cand = list(members) + [z]
        z_p, _ = _newton_polish(model, r, target, z, mlt, zero_tol)
        if abs(z_p - z) <= 1e-4 * (1.0 + abs(z)):
            cand.append(z_p)
        cand.extend(complex(c.real) for c in list(cand)
                    if abs(c.imag) <= 1e-5 * (1.0 + abs(c)))
        t_c, _ = _target_values(model, np.array(cand), r, target)
        best = int(np.argmin(np.abs(t_c)))
        zeros.append(LZero(L=complex(cand[best]), multiplicity=int(mlt),
                           residual=abs(complex(t_c[best]))))
    return ZeroSet(model=model, target=target, radius=r,
                   box=(corner_lo, corner_hi), zeros=zeros,
                   winding_total=int(total),
                   info={"requested_box": (lo, hi)})


# ---------------------------------------------------------------------------
# zeros in r at fixed L
# ---------------------------------------------------------------------------

def _profile_target(model, L, r_pts, target):
    prof = eigen_profile(model, L, float(np.max(r_pts)), r_points=np.asarray(r_pts))
    if target == "ball":
        h = prof["Phi"]
        dh = model.theta(prof["r"]) * prof["phi"]
    else:
        h = prof["phi"] - (1.0 if target == "mvp" else 0.0)
        dh = prof["dphi_dr"]
    return h, dh


def find_r_zeros(model, L, r_max, target="sphere", zero_tol=DEFAULT_ZERO_TOL,
                 r_min=1e-3):
    """All r in (0, r_max] where the target of r vanishes, for fixed L.

    Scans a dense oscillation-resolving profile for minima of |h|² (sign
    changes of Re(h̄ h')), brackets them, then polishes with Newton on
    Re(h̄ h') using exact ODE states; a root is accepted when |h| < zero_tol.
    """
    _check_target(target)
    if r_max > 50:
        raise ValueError("r_max must be at most 50")
    L = complex(L)
    osc = math.sqrt(abs(L)) * r_max
    n = int(max(800, 60 * osc / math.pi))
    grid = np.linspace(0.0, r_max, n + 1)
    h, dh = _profile_target(model, L, grid, target)
    q = np.real(np.conj(h) * dh)
    scale = float(np.max(np.abs(h)))

    # minima of |h|^2: q crosses - to +
    idx = np.nonzero((q[:-1] < 0) & (q[1:] >= 0) & (grid[1:] > r_min))[0]
    if idx.size == 0:
        return []
    cand = grid[idx] - q[idx] * (grid[idx + 1] - grid[idx]) / (q[idx + 1] - q[idx])
    # cheap rejection: |h| at the sampled bracket already far from zero
    near = np.minimum(np.abs(h[idx]), np.abs(h[idx + 1])) < 1e-2 * max(scale, 1.0)
    cand = cand[near]
    if cand.size == 0:
        return []

    for _ in range(4):
        cand = np.sort(cand)
        prof = eigen_profile(model, L, float(np.max(cand)), r_points=cand)
        if target == "ball":
            h_c = prof["Phi"]
            dh_c = model.theta(cand) * prof["phi"]
            ddh = model.theta_prime(cand) * prof["phi"] \
                + model.theta(cand) * prof["dphi_dr"]
        else:
            h_c = prof["phi"] - (1.0 if target == "mvp" else 0.0)
            dh_c = prof["dphi_dr"]
            ddh = L * prof["phi"] - model.dlog_theta(cand) * prof["dphi_dr"]
        qq = np.real(np.conj(h_c) * dh_c)
        dq = np.abs(dh_c) ** 2 + np.real(np.conj(h_c) * ddh)
        step = np.where(dq != 0, qq / np.where(dq == 0, 1.0, dq), 0.0)
        cand = cand - step
        cand = np.clip(cand, r_min, r_max)
        if np.max(np.abs(step)) < 1e-13 * r_max:
            break
    h_f, _ = _profile_target(model, L, np.sort(cand), target)
    roots = sorted(float(c) for c, hv in zip(np.sort(cand), h_f)
                   if abs(hv) < zero_tol)
    out = []
    for rt in roots:
        if out and rt - out[-1] < SEPARATION:
            raise WindingError(
                f"r-zeros {out[-1]:.9g} and {rt:.9g} closer than {SEPARATION}")
        out.append(rt)
    return out


# ---------------------------------------------------------------------------
# bad radii and certification
# ---------------------------------------------------------------------------

def bad_radii(model, r1, variant="sphere", box=(-60 - 8j, 5 + 8j), r_max=10.0,
              zero_tol=DEFAULT_ZERO_TOL):
    """Radii r2 whose zero set shares a point with that of r1 (in the box).

    Union over the L-zeros of the r1 target of the r-zero sets of the same
    target function; sorted and deduplicated at 1e-8.
    """
    zs = find_L_zeros(model, r1, target=variant, box=box, zero_tol=zero_tol)
    collected = []
    for z in zs.zeros:
        collected.extend(find_r_zeros(model, z.L, r_max, target=variant,
                                      zero_tol=max(zero_tol, 1e-9)))
    collected.sort()
    out = []
    for rr in collected:
        if not out or rr - out[-1] > 1e-8:
            out.append(rr)
    return out


def certify_pair(model, r1, r2, variant="sphere", box=(-60 - 8j, 5 + 8j),
                 zero_tol=DEFAULT_ZERO_TOL):
    """Certify that the r1 and r2 zero sets are disjoint inside the box.

    Verdicts: no-common-zero-in-box (pairwise separation > 1e-6),
    common-zero-found (joint witness with both residuals < zero_tol), or
    inconclusive.  The certificate only covers the searched box.
    """
    _check_target(variant)
    z1 = find_L_zeros(model, r1, target=variant, box=box, zero_tol=zero_tol)
    z2 = find_L_zeros(model, r2, target=variant, box=box, zero_tol=zero_tol)
    a, b = z1.values(), z2.values()

    def joint_residual(L):
        t1, _ = _target_values(model, np.array([L]), float(r1), variant)
        t2, _ = _target_values(model, np.array([L]), float(r2), variant)
        return max(abs(complex(t1[0])), abs(complex(t2[0])))

    if a.size == 0 or b.size == 0:
        pool = list(a) + list(b)
        mjr = min((joint_residual(L) for L in pool), default=math.inf)
        return RadiusCertificate(model=model, variant=variant, r1=float(r1),
                                 r2=float(r2), box=z1.box,
                                 verdict="no-common-zero-in-box", witness=None,
                                 min_joint_residual=mjr, common=[])

    dist = np.abs(a[:, None] - b[None, :])
    # multiple zeros are located only to ~sqrt(noise), so candidate pairing
    # must be looser than the final separation verdict
    attempt = np.maximum(SEPARATION, 1e-4 * (1.0 + np.abs(a)[:, None]))
    common = []
    for i, j in zip(*np.nonzero(dist <= attempt)):
        mid = (a[i] + b[j]) / 2
        z, res1 = _newton_polish(model, float(r1), variant, mid, 1, zero_tol)
        t2, _ = _target_values(model, np.array([z]), float(r2), variant)
        res2 = abs(complex(t2[0]))
        if res1 < zero_tol and res2 < zero_tol:
            common.append(complex(z))
    mjr = min(joint_residual(L) for L in np.concatenate([a, b]))
    if common:
        common.sort(key=lambda z: (abs(z), z.real, z.imag))
        return RadiusCertificate(model=model, variant=variant, r1=float(r1),
                                 r2=float(r2), box=z1.box,
                                 verdict="common-zero-found",
                                 witness=common[0],
                                 min_joint_residual=min(joint_residual(L)
                                                        for L in common),
                                 common=common)
    if float(np.min(dist)) > SEPARATION:
        return RadiusCertificate(model=model, variant=variant, r1=float(r1),
                                 r2=float(r2), box=z1.box,
                                 verdict="no-common-zero-in-box", witness=None,
                                 min_joint_residual=mjr, common=[])
    return RadiusCertificate(model=model, variant=variant, r1=float(r1),
                             r2=float(r2), box=z1.box, verdict="inconclusive",
                             witness=None, min_joint_residual=mjr, common=[])


# ---------------------------------------------------------------------------
# the classical cosine counterexample
# ---------------------------------------------------------------------------

def mvp_counterexample_demo(n_samples=100, seed=20260814):
    """cos satisfies the sphere mean value property at radius 2π, yet is not
    harmonic; at radius π the property fails.  Linear functions satisfy it
    at every radius.  Returns a dict of measured residuals.
    """
    rng = np.random.default_rng(seed)
    x = rng.uniform(-20.0, 20.0, size=n_samples)

    def mvp_residual(f, r):
        return float(np.max(np.abs((f(x - r) + f(x + r)) / 2 - f(x))))

    res_2pi = mvp_residual(np.cos, 2 * math.pi)
    res_pi = mvp_residual(np.cos, math.pi)
    a, b = 1.7, -0.3
    res_linear = max(mvp_residual(lambda s: a * s + b, r)
                     for r in (1.0, math.sqrt(2), 2 * math.pi))
    return {
        "residual_2pi": res_2pi,
        "residual_pi": res_pi,
        "residual_linear": res_linear,
        "cos_second_derivative_at_0": -1.0,
        "mvp_holds_at_2pi": res_2pi < 1e-14,
        "mvp_fails_at_pi": res_pi > 0.1,
        "cos_is_harmonic": False,
    }
