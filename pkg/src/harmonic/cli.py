"""Command-line front end: reproducible experiments, machine-readable reports.

Curve-valued commands write CSV, verdict-valued commands write JSON; both
embed the run manifest, print floats with 17 significant digits, and contain
nothing time- or host-dependent, so re-running an invocation reproduces the
output bytes exactly.  JSON reports validate against the shipped schema
(schemas/report.schema.json).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, asymptotics, geometry, pde, profiles, suite
from . import transforms, two_radius
from .density import (make_custom, make_damek_ricci, make_euclidean,
                      make_real_hyperbolic)
from .grids import make_grid
from .spherical import phi as phi_eval
from .transforms import EvenLineFunction


class CLIError(ValueError):
    """User-facing invocation problem (bad flag combination, bad value)."""


# ---------------------------------------------------------------------------
# canonical serialization: deterministic bytes, 17 significant digits
# ---------------------------------------------------------------------------

def _float_str(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _canon(obj, indent=None, level=0):
    """Canonical JSON text: sorted keys, fixed float format.

    The stdlib encoder hardcodes repr() for floats, so this tiny serializer
    exists to pin the number format; indent=None gives the compact one-line
    form used inside CSV headers.
    """
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return json.dumps(_float_str(x))
        return _float_str(x)
    if isinstance(obj, (complex, np.complexfloating)):
        return _canon({"re": float(obj.real), "im": float(obj.imag)},
                      indent, level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = sorted(obj.items())
        if indent is None:
            return "{" + ",".join(f"{json.dumps(k)}:{_canon(v)}"
                                  for k, v in items) + "}"
        pad = " " * (indent * level)
        pad_in = " " * (indent * (level + 1))
        body = ",\n".join(
            f"{pad_in}{json.dumps(k)}: {_canon(v, indent, level + 1)}"
            for k, v in items)
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if indent is None:
            return "[" + ",".join(_canon(v) for v in obj) + "]"
        pad = " " * (indent * level)
        pad_in = " " * (indent * (level + 1))
        body = ",\n".join(pad_in + _canon(v, indent, level + 1) for v in obj)
        return "[\n" + body + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _write_json(doc, out):
    _emit(_canon(doc, indent=2) + "\n", out)


def _write_csv(manifest, columns, rows, out):
    lines = ["# manifest: " + _canon(manifest),
             "# columns: " + ",".join(columns)]
    for row in rows:
        lines.append(",".join(_float_str(v) for v in row))
    _emit("\n".join(lines) + "\n", out)


# ---------------------------------------------------------------------------
# flag parsing helpers
# ---------------------------------------------------------------------------

def _parse_complex(text):
    parts = str(text).split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise CLIError(f"expected 're' or 're,im', got {text!r}")


def _parse_box(text):
    parts = str(text).split(",")
    if len(parts) != 4:
        raise CLIError(f"--box wants re_lo,im_lo,re_hi,im_hi, got {text!r}")
    a, b, c, d = (float(p) for p in parts)
    return complex(a, b), complex(c, d)


def _add_model_flags(sp):
    sp.add_argument("--model", default="euclidean",
                    help="euclidean | hyperbolic | damek-ricci "
                         "(with --theta: ignored, custom density)")
    sp.add_argument("--n", type=int, default=None,
                    help="sphere dimension for euclidean/hyperbolic/custom")
    sp.add_argument("--m", type=int, default=None,
                    help="Damek-Ricci horosphere parameter m")
    sp.add_argument("--k", type=int, default=None,
                    help="Damek-Ricci horosphere parameter k")
    sp.add_argument("--theta", default=None, metavar="EXPR",
                    help="density as a sympy expression in r, e.g. 'sinh(r)**2'")


def _add_common_flags(sp):
    sp.add_argument("--out", default=None, help="output path (default stdout)")
    sp.add_argument("--seed", type=int, default=suite.DEFAULT_SEED,
                    help="seed for randomized checks")
    sp.add_argument("--tol", type=float, default=None,
                    help="override the command's default tolerance")


def _resolve_model(args):
    if getattr(args, "theta", None) is not None:
        if args.n is None:
            raise CLIError("--theta needs --n (theta ~ r^n near 0)")
        return make_custom(args.theta, args.n)
    name = (args.model or "euclidean").lower().replace("_", "-")
    if name in ("euclidean", "flat"):
        return make_euclidean(2 if args.n is None else args.n)
    if name in ("hyperbolic", "real-hyperbolic"):
        return make_real_hyperbolic(2 if args.n is None else args.n)
    if name in ("damek-ricci", "dr"):
        m = 2 if args.m is None else args.m
        k = 1 if args.k is None else args.k
        return make_damek_ricci(m, k)
    raise CLIError(f"unknown model {args.model!r}; use euclidean, "
                   "hyperbolic, damek-ricci, or --theta")


def _model_desc(model):
    if model is None:
        return None
    return {"key": model.key, "name": model.name,
            "n": int(model.n), "H": float(model.H)}


_PROFILES = {"smooth": profiles.smooth_bump, "gauss": profiles.gauss_bump,
             "annulus": profiles.annulus_bump}


def _add_profile_flags(sp, suffix="", default="smooth", width=1.0):
    sp.add_argument(f"--profile{suffix}", default=default,
                    choices=sorted(_PROFILES),
                    help=f"radial datum shape{' for the second factor' if suffix else ''}")
    sp.add_argument(f"--width{suffix}", type=float, default=width)
    sp.add_argument(f"--center{suffix}", type=float, default=1.0,
                    help="annulus profile center (annulus only)")


def _resolve_profile(args, suffix=""):
    name = getattr(args, f"profile{suffix}")
    width = getattr(args, f"width{suffix}")
    center = getattr(args, f"center{suffix}")
    if name == "annulus":
        return profiles.annulus_bump(center=center, width=width)
    return _PROFILES[name](width)


def _manifest(command, args, model, params, tolerances=None):
    return {"command": command, "version": __version__,
            "seed": int(getattr(args, "seed", suite.DEFAULT_SEED)),
            "model": _model_desc(model), "parameters": params,
            "tolerances": tolerances or {},
            "outputs": [args.out] if getattr(args, "out", None) else []}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_phi(args):
    model = _resolve_model(args)
    lam = _parse_complex(args.lam)
    params = {"lambda": lam, "rmax": args.rmax, "spacing": 0.05}
    mani = _manifest("phi", args, model, params)
    grid = make_grid(args.rmax, spacing=0.05)
    f = phi_eval(model, lam, grid)
    vals = np.asarray(f.values, dtype=complex)
    ders = np.asarray(f.derivative_values, dtype=complex)
    rows = zip(grid.points, vals.real, vals.imag, ders.real, ders.imag)
    _write_csv(mani, ["r", "phi_re", "phi_im", "dphi_re", "dphi_im"],
               rows, args.out)
    return 0


def _cmd_zeros(args):
    model = _resolve_model(args)
    box = _parse_box(args.box)
    tol = args.tol if args.tol is not None else 1e-10
    params = {"r": args.r, "target": args.target, "box": [box[0], box[1]]}
    mani = _manifest("zeros", args, model, params, {"zero_tol": tol})
    zs = two_radius.find_L_zeros(model, args.r, target=args.target, box=box,
                                 zero_tol=tol)
    result = {"count": len(zs.zeros), "winding_total": int(zs.winding_total),
              "zeros": [{"L": z.L, "multiplicity": int(z.multiplicity),
                         "residual": float(z.residual)} for z in zs.zeros]}
    _write_json({"kind": "zero-set", "manifest": mani, "result": result},
                args.out)
    return 0


def _cmd_bad_radii(args):
    model = _resolve_model(args)
    box = _parse_box(args.box)
    tol = args.tol if args.tol is not None else 1e-10
    params = {"r1": args.r1, "rmax": args.rmax, "target": args.target,
              "box": [box[0], box[1]]}
    mani = _manifest("bad-radii", args, model, params, {"zero_tol": tol})
    radii = two_radius.bad_radii(model, args.r1, args.target, box=box,
                                 r_max=args.rmax, zero_tol=tol)
    result = {"count": len(radii), "radii": [float(r) for r in radii]}
    _write_json({"kind": "bad-radii", "manifest": mani, "result": result},
                args.out)
    return 0


_CONCLUSION = {"common-zero-found": "rejected",
               "no-common-zero-in-box": "accepted",
               "inconclusive": "inconclusive"}


def _cmd_certify(args):
    model = _resolve_model(args)
    box = _parse_box(args.box)
    tol = args.tol if args.tol is not None else 1e-10
    params = {"r1": args.r1, "r2": args.r2, "target": args.target,
              "box": [box[0], box[1]]}
    mani = _manifest("certify", args, model, params, {"zero_tol": tol})
    cert = two_radius.certify_pair(model, args.r1, args.r2,
                                   variant=args.target, box=box, zero_tol=tol)
    result = {"verdict": _CONCLUSION[cert.verdict],
              "zero_search": cert.verdict,
              "witness": cert.witness,
              "min_joint_residual": float(cert.min_joint_residual),
              "common": list(cert.common), "note": cert.note}
    _write_json({"kind": "certificate", "manifest": mani, "result": result},
                args.out)
    return 0


def _cmd_abel(args):
    model = _resolve_model(args)
    prof = _resolve_profile(args)
    params = {"profile": args.profile, "width": args.width,
              "center": args.center, "smax": args.smax}
    mani = _manifest("abel", args, model, params)
    g = transforms.abel(model, prof, s_max=args.smax)
    _write_csv(mani, ["s", "Af"], zip(g.grid.points, g.values), args.out)
    return 0


def _cmd_fourier(args):
    model = _resolve_model(args)
    prof = _resolve_profile(args)
    lams = np.linspace(0.0, args.lambda_max, args.count)
    params = {"profile": args.profile, "width": args.width,
              "center": args.center, "lambda_max": args.lambda_max,
              "count": args.count}
    mani = _manifest("fourier", args, model, params)
    F = transforms.spherical_fourier(model, prof, lams)
    _write_csv(mani, ["lambda", "F"], zip(lams, F.values), args.out)
    return 0


def _cmd_convolve(args):
    model = _resolve_model(args)
    f = _resolve_profile(args)
    g = _resolve_profile(args, suffix="2")
    params = {"profile": args.profile, "width": args.width,
              "profile2": args.profile2, "width2": args.width2}
    mani = _manifest("convolve", args, model, params)
    conv = transforms.radial_convolve(model, f, g)
    _write_csv(mani, ["r", "f_star_g"], zip(conv.grid.points, conv.values),
               args.out)
    return 0


def _cmd_wave(args):
    model = _resolve_model(args)
    prof = _resolve_profile(args)
    params = {"profile": args.profile, "width": args.width,
              "center": args.center, "t": args.t, "dt": args.dt,
              "dr": args.dr}
    mani = _manifest("wave", args, model, params)
    states = pde.radial_wave_solve(model, prof, args.t, args.dt, dr=args.dr)
    st = states[-1]
    _write_csv(mani, ["r", "u", "u_t"], zip(st.grid.points, st.u, st.u_t),
               args.out)
    return 0


def _cmd_kg(args):
    model = _resolve_model(args)
    grid = make_grid(args.smax0, spacing=0.01)
    w = args.width

    def gf(s):
        return np.exp(-((s / w) ** 2))

    g = EvenLineFunction(grid, gf(grid.points), args.smax0,
                         deriv_values=-2 * grid.points / w**2
                         * gf(grid.points),
                         exact_node_values=gf(grid.nodes))
    params = {"width": w, "t": args.t, "smax0": args.smax0}
    mani = _manifest("kg", args, model, params)
    v = pde.kg_solve(model.H, g, args.t)
    vt = v.info["vt_values"]
    _write_csv(mani, ["s", "v", "v_s", "v_t"],
               zip(v.grid.points, v.values, v.deriv_values, vt), args.out)
    return 0


def _cmd_heat(args):
    model = _resolve_model(args)
    params = {"t": args.t, "width": args.width, "dr": args.dr}
    mani = _manifest("heat", args, model, params)
    states = pde.radial_heat_solve(model, args.t, args.width, dr=args.dr)
    st = states[-1]
    _write_csv(mani, ["r", "k"], zip(st.r, st.k), args.out)
    return 0


def _cmd_heat_check(args):
    model = _resolve_model(args)
    tol = args.tol if args.tol is not None else 1e-3
    lams = np.linspace(0.0, args.lambda_max, args.count)
    params = {"t": args.t, "lambda_max": args.lambda_max, "count": args.count}
    mani = _manifest("heat-check", args, model, params, {"rel_tol": tol})
    measured = pde.heat_identity_check(model, args.t, lams)
    passed = bool(measured <= tol)
    result = {"max_rel_err": float(measured), "rel_tol": tol,
              "passed": passed,
              "detail": "spectral ratio of evolved vs initial heat data "
                        "against exp(-(lambda^2+H^2/4)t)"}
    _write_json({"kind": "heat-check", "manifest": mani, "result": result},
                args.out)
    return 0 if passed else 1


def _cmd_cheeger(args):
    model = _resolve_model(args)
    params = {"rmax": args.rmax}
    mani = _manifest("cheeger", args, model, params)
    csv_path = str(Path(args.out).with_suffix(".csv")) if args.out else None
    if csv_path:
        mani["outputs"] = [args.out, csv_path]
    rep = asymptotics.cheeger_chain_report(model, r_max=args.rmax)
    result = {
        "H": float(rep.H),
        "mu_final": float(rep.mu_final),
        "lambda0_extrapolated": float(rep.lambda0_extrapolated),
        "mu_estimates": [[float(r), float(v)] for r, v in rep.mu_estimates],
        "sphere_ratio": [[float(r), float(v)] for r, v in rep.sphere_ratio],
        "lambda0_estimates": [[float(r), float(v)]
                              for r, v in rep.lambda0_estimates],
        "verdicts": [{"name": v.name, "status": v.status, "detail": v.detail}
                     for v in rep.verdicts],
        "ok": bool(rep.ok),
    }
    _write_json({"kind": "cheeger-report", "manifest": mani,
                 "result": result}, args.out)
    if csv_path:
        rows = [(r, mu, ratio) for (r, mu), (_, ratio)
                in zip(rep.mu_estimates, rep.sphere_ratio)]
        _write_csv(mani, ["r", "log_vol_over_r", "area_over_vol"],
                   rows, csv_path)
    return 0 if rep.ok else 1


def _cmd_geo_check(args):
    space = geometry.space_by_tag(args.space)
    rng = np.random.default_rng(args.seed)
    lam = 1.0
    x = space.sphere_param(space.origin, 1.0, rng.uniform(0.0, 2 * math.pi))
    f = geometry.bump_patch(
        space, space.sphere_param(space.origin, 0.7,
                                  rng.uniform(0.0, 2 * math.pi)), 1.1)
    g = geometry.bump_patch(
        space, space.sphere_param(space.origin, 1.3,
                                  rng.uniform(0.0, 2 * math.pi)), 1.0)
    checks = [
        ("displacement_identity",
         geometry.displacement_identity_check(space, lam, x,
                                              np.linspace(0.3, 2.0, 5)),
         1e-6),
        ("projector_commutes",
         geometry.projector_convolution_check(space, 1.0, f), 1e-6),
        ("projector_selfadjoint",
         geometry.projector_selfadjoint_check(space, f, g, 3.4), 1e-6),
        ("projector_idempotent", geometry.idempotence_check(space, f), 1e-10),
    ]
    params = {"space": args.space}
    mani = _manifest("geo-check", args, None, params)
    ok = all(m <= b for _, m, b in checks)
    result = {"checks": [{"name": n, "measured": float(m), "bound": b,
                          "passed": bool(m <= b)} for n, m, b in checks],
              "ok": ok}
    _write_json({"kind": "geo-check", "manifest": mani, "result": result},
                args.out)
    return 0 if ok else 1


def _cmd_suite(args):
    # progress goes to stderr so a bare `harmonic suite` still leaves
    # parseable JSON on stdout
    def progress(res):
        mark = "PASS" if res.passed else "FAIL"
        print(f"{mark} [{res.criterion:2d}] {res.name:40s} "
              f"{_float_str(res.measured)} {res.comparison} "
              f"{_float_str(res.bound)}  ({res.seconds:.2f}s)",
              file=sys.stderr, flush=True)

    rep = suite.run_suite(quick=args.quick, seed=args.seed,
                          progress=progress)
    params = {"quick": bool(args.quick)}
    mani = _manifest("suite", args, None, params)
    # wall-clock seconds stay out of the file so reruns are byte-identical
    result = {
        "total": len(rep.checks),
        "passed_count": sum(c.passed for c in rep.checks),
        "all_passed": bool(rep.all_passed),
        "quick": bool(rep.quick),
        "checks": [{"name": c.name, "criterion": int(c.criterion),
                    "passed": bool(c.passed), "measured": float(c.measured),
                    "bound": float(c.bound), "comparison": c.comparison,
                    "detail": c.detail} for c in rep.checks],
    }
    _write_json({"kind": "suite-report", "manifest": mani, "result": result},
                args.out)
    print(f"{result['passed_count']}/{result['total']} checks passed "
          f"({rep.seconds:.1f}s cpu)", file=sys.stderr)
    return 0 if rep.all_passed else 1


# ---------------------------------------------------------------------------
# parser assembly
# ---------------------------------------------------------------------------

def _build_parser():
    p = argparse.ArgumentParser(
        prog="harmonic",
        description="Numerical workbench for noncompact harmonic spaces "
                    "defined by a radial volume density.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sp = sub.add_parser("phi", help="radial eigenfunction samples (CSV)")
    _add_model_flags(sp)
    _add_common_flags(sp)
    sp.add_argument("--lambda", dest="lam", default="1,0", metavar="RE[,IM]")
    sp.add_argument("--rmax", type=float, default=10.0)
    sp.set_defaults(fn=_cmd_phi)

    sp = sub.add_parser("zeros", help="eigenvalue-plane zeros of a radius "
                                      "functional (JSON)")
    _add_model_flags(sp)
    _add_common_flags(sp)
    sp.add_argument("--r", type=float, default=1.0)
    sp.add_argument("--target", default="sphere",
                    choices=["sphere", "ball", "mvp"])
    sp.add_argument("--box", default="-60,-8,5,8", metavar="a,b,c,d",
                    help="search box corners re_lo,im_lo,re_hi,im_hi")
    sp.set_defaults(fn=_cmd_zeros)

    sp = sub.add_parser("bad-radii", help="second radii sharing a zero with "
                                          "r1 (JSON)")
    _add_model_flags(sp)
    _add_common_flags(sp)
    sp.add_argument("--r1", type=float, default=1.0)
    sp.add_argument("--rmax", type=float, default=10.0)
    sp.add_argument("--target", default="sphere",
                    choices=["sphere", "ball", "mvp"])
    sp.add_argument("--box", default="-60,-8,5,8", metavar="a,b,c,d")
    sp.set_defaults(fn=_cmd_bad_radii)

    sp = sub.add_parser("certify", help="two-radius disjointness certificate "
                                        "(JSON)")
    _add_model_flags(sp)
    _add_common_flags(sp)
    sp.add_argument("--r1", type=float, required=True)
    sp.add_argument("--r2", type=float, required=True)
    sp.add_argument("--target", default="sphere",
                    choices=["sphere", "ball", "mvp"])
    sp.add_argument("--box", default="-60,-8,5,8", metavar="a,b,c,d")
    sp.set_defaults(fn=_cmd_certify)

    sp = sub.add_parser("abel", help="Abel transform of a radial bump (CSV)")
    _add_model_flags(sp)
    _add_common_flags(sp)
    _add_profile_flags(sp)
    sp.add_argument("--smax", type=float, default=None)
    sp.set_defaults(fn=_cmd_abel)

    sp = sub.add_parser("fourier", help="spherical Fourier transform (CSV)")
    _add_model_flags(sp)
    _add_common_flags(sp)
    _add_profile_flags(sp)
    sp.add_argument("--lambda-max", type=float, default=8.0)
    sp.add_argument("--count", type=int, default=161)
    sp.set_defaults(fn=_cmd_fourier)

    sp = sub.add_parser("convolve", help="radial convolution of two bumps "
                                         "(CSV)")
    _add_model_flags(sp)
    _add_common_flags(sp)
    _add_profile_flags(sp, width=0.35, default="gauss")
    _add_profile_flags(sp, suffix="2", width=0.45, default="gauss")
    sp.set_defaults(fn=_cmd_convolve)

    sp = sub.add_parser("wave", help="radial wave slice at time t (CSV)")
    _add_model_flags(sp)
    _add_common_flags(sp)
    _add_profile_flags(sp)
    sp.add_argument("--t", type=float, default=3.0)
    sp.add_argument("--dt", type=float, default=0.004)
    sp.add_argument("--dr", type=float, default=0.01)
    sp.set_defaults(fn=_cmd_wave)

    sp = sub.add_parser("kg", help="Klein-Gordon line evolution from a "
                                   "Gaussian (CSV)")
    _add_model_flags(sp)
    _add_common_flags(sp)
    sp.add_argument("--width", type=float, default=0.5)
    sp.add_argument("--t", type=float, default=2.0)
    sp.add_argument("--smax0", type=float, default=4.0,
                    help="initial datum domain half-length")
    sp.set_defaults(fn=_cmd_kg)

    sp = sub.add_parser("heat", help="radial heat profile at time t (CSV)")
    _add_model_flags(sp)
    _add_common_flags(sp)
    sp.add_argument("--t", type=float, default=0.5)
    sp.add_argument("--width", type=float, default=0.3)
    sp.add_argument("--dr", type=float, default=0.01)
    sp.set_defaults(fn=_cmd_heat)

    sp = sub.add_parser("heat-check", help="heat multiplier identity verdict "
                                           "(JSON; exit 1 on failure)")
    _add_model_flags(sp)
    _add_common_flags(sp)
    sp.add_argument("--t", type=float, default=0.5)
    sp.add_argument("--lambda-max", type=float, default=2.0)
    sp.add_argument("--count", type=int, default=9)
    sp.set_defaults(fn=_cmd_heat_check)

    sp = sub.add_parser("cheeger", help="growth chain and spectral bottom "
                                        "report (JSON + CSV)")
    _add_model_flags(sp)
    _add_common_flags(sp)
    sp.add_argument("--rmax", type=float, default=40.0)
    sp.set_defaults(fn=_cmd_cheeger)

    sp = sub.add_parser("geo-check", help="non-radial identities on an "
                                          "explicit 2D space (JSON)")
    _add_common_flags(sp)
    sp.add_argument("--space", default="plane",
                    choices=["plane", "euclidean", "hyperbolic_plane", "h2"])
    sp.set_defaults(fn=_cmd_geo_check)

    sp = sub.add_parser("suite", help="full verification battery (JSON; "
                                      "exit 0 iff all checks pass)")
    _add_common_flags(sp)
    sp.add_argument("--quick", action="store_true",
                    help="skip the slowest checks (still >= 40 checks)")
    sp.set_defaults(fn=_cmd_suite)

    return p


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        mani = {"command": args.command, "version": __version__,
                "seed": int(getattr(args, "seed", suite.DEFAULT_SEED)),
                "model": None, "parameters": {}, "tolerances": {},
                "outputs": [args.out] if getattr(args, "out", None) else []}
        doc = {"kind": "error", "manifest": mani,
               "error": {"type": type(exc).__name__, "message": str(exc)}}
        _write_json(doc, getattr(args, "out", None))
        return 1


if __name__ == "__main__":
    sys.exit(main())
