"""Command-line surface: one thin subcommand per library entry point.

Exit codes: 0 success, 2 malformed input, 3 numerical failure,
4 non-convergence. ``--error-json`` emits the failure as machine-readable
JSON on stdout. A resolved run configuration can be persisted with
``--save-config`` and replayed with ``--config``; given the same seed the
outputs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import serialization as ser
from .coefficients import find_constant_coefficients, verify_solution
from .errors import (BranchError, CollisionError, ConvergenceError,
                     DisjointnessError, DomainError, ExhaustedError,
                     GeometryError, InsufficientData, LoewnerError,
                     PairingError, ResolutionError, StepError)
from .forward import steer_through, trace_multi, trace_single
from .inverse import drive_from_slit, hcap_of_slit
from .welding import (hcap_monte_carlo, hsiz, is_welded, local_holder_norms,
                      thread_count)

DEFAULTS = {
    "steps": 4000,
    "dcap": 1e-3,
    "tol": 1e-4,
    "grid": "64x64",
    "window": 1e-3,
    "walkers": 100000,
    "resolution": 1e-3,
    "seed": 0,
}

_INPUT_ERRORS = (DomainError, ResolutionError)
_NUMERIC_ERRORS = (StepError, CollisionError, GeometryError, BranchError,
                   DisjointnessError, ExhaustedError, PairingError,
                   InsufficientData)


def _emit(args, kind: str, payload: dict):
    payload = dict(payload)
    payload["config"] = _resolved_config(args)
    text = ser.dump_report(kind, payload, getattr(args, "out", None))
    if not getattr(args, "out", None):
        sys.stdout.write(text)


def _resolved_config(args) -> dict:
    # output destinations are not part of the reproducible parameter set
    skip = {"func", "error_json", "save_config", "config", "out", "svg"}
    out = {"command": args.command}
    for k, v in sorted(vars(args).items()):
        if k in skip or k == "command" or v is None:
            continue
        out[k] = v
    return out


def _parse_grid(text: str):
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise DomainError(f"grid must look like 64x64, got {text!r}")


def _parse_point(text: str) -> complex:
    try:
        x, y = (float(v) for v in text.split(","))
        return complex(x, y)
    except ValueError:
        raise DomainError(f"point must look like x,y, got {text!r}")


# -- commands -----------------------------------------------------------------

def cmd_trace(args):
    if bool(args.driving) == bool(args.system):
        raise DomainError("trace needs exactly one of --driving / --system")
    if args.driving:
        driving = ser.driving_from_json(ser.load_json(args.driving))
        result = trace_single(driving, args.steps)
    else:
        system = ser.system_from_json(ser.load_json(args.system))
        result = trace_multi(system, args.steps)
    csv = ser.trace_to_csv(result.times, result.curves)
    if args.out:
        ser.write_atomic(args.out, csv)
    else:
        sys.stdout.write(csv)
    if args.svg:
        ser.write_atomic(args.svg, ser.trace_to_svg(result.curves))


def cmd_drive(args):
    slit = ser.slit_from_json(ser.load_json(args.slit))
    result = drive_from_slit(slit, args.dcap)
    _emit(args, "drive", {
        "driving": ser.driving_to_json(result.driving),
        "hcap": 2.0 * result.total_hcap_time,
        "steps": len(result.driving.times) - 1,
        "used_vertical_fallback": result.used_vertical_fallback,
    })


def cmd_coeffs(args):
    slits = ser.slits_from_json(ser.load_json(args.slits))
    solution = find_constant_coefficients(slits, args.tol)
    report = verify_solution(slits, solution, steps=min(args.steps, 2000))
    _emit(args, "coeffs", {
        "lambdas": solution.lambdas,
        "residuals": solution.residuals,
        "hcaps": solution.hcaps,
        "horizon": solution.horizon,
        "iterations": solution.iterations,
        "drivings": [ser.driving_to_json(d) for d in solution.drivings],
        "hausdorff": report.hausdorff,
        "xdot0": report.xdot0,
    })


def cmd_weld(args):
    system = ser.system_from_json(ser.load_json(args.system))
    gt, go = _parse_grid(args.grid)
    report = is_welded(system, gt, go)
    _emit(args, "weld", {
        "welded": report.welded,
        "verdict": report.verdict,
        "margin": report.margin,
        "n_probes": report.n_probes,
        "qs_constant": report.qs_constant,
        "component_intervals": [list(iv) for iv in report.component_intervals],
        "pairs": [p.tolist() for p in report.pairs],
    })


def cmd_diag(args):
    driving = ser.driving_from_json(ser.load_json(args.driving))
    rep = local_holder_norms(driving, args.window, lam=args.lam)
    _emit(args, "diag", {
        "times": rep.times,
        "holder_left": rep.holder_left,
        "holder_right": rep.holder_right,
        "limsup_left": rep.limsup_left,
        "liminf_left": rep.liminf_left,
        "thresholds": rep.thresholds,
        "verdicts": rep.verdicts,
        "window": rep.window,
        "proxy_scale": rep.proxy_scale,
    })


def cmd_hcap(args):
    obj = ser.load_json(args.slit)
    slits = ser.slits_from_json(obj)
    payload = {"method": args.method}
    if args.method == "chain":
        if len(slits) != 1:
            raise DomainError("chain method takes a single slit")
        payload["value"] = hcap_of_slit(slits[0], args.dcap)
    elif args.method == "moment":
        if len(slits) != 1:
            raise DomainError("moment method takes a single slit")
        result = drive_from_slit(slits[0], args.dcap)
        payload["value"] = result.chain.hcap_moment()
    elif args.method == "mc":
        est, se = hcap_monte_carlo(slits, walkers=args.walkers, seed=args.seed)
        payload["value"] = est
        payload["stderr"] = se
        payload["walkers"] = args.walkers
        payload["seed"] = args.seed
    elif args.method == "hsiz":
        area = hsiz(slits, args.resolution)
        payload["value"] = area
        payload["lower_hcap_bound"] = area / 66.0
        payload["upper_hcap_bound"] = area * 7.0 / (2.0 * np.pi)
    else:
        raise DomainError(f"unknown method {args.method!r}")
    _emit(args, "hcap", payload)


def cmd_steer(args):
    z0 = _parse_point(getattr(args, "from"))
    z1 = _parse_point(args.to)
    driving, t_star = steer_through(z0, z1)
    c = 0.0 if z1 == z0 else (z1.real - z0.real) / (z1.imag - z0.imag)
    _emit(args, "steer", {
        "t_star": t_star,
        "c": c,
        "driving": ser.driving_to_json(driving),
    })


# -- wiring ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="loewner",
        description="Chordal Loewner toolkit: trace hulls, recover drivings, "
                    "solve constant coefficients, test welding")
    p.add_argument("--print-config", action="store_true",
                   help="print the default parameters and exit")
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--out", help="output file (stdout if omitted)")
        sp.add_argument("--error-json", action="store_true",
                        help="report failures as JSON on stdout")
        sp.add_argument("--config", help="JSON file with parameter overrides")
        sp.add_argument("--save-config", help="write the resolved parameters")

    sp = sub.add_parser("trace", help="trace hulls from driving functions")
    sp.add_argument("--driving")
    sp.add_argument("--system")
    sp.add_argument("--steps", type=int, default=DEFAULTS["steps"])
    sp.add_argument("--svg")
    common(sp)
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("drive", help="recover the driving function of a slit")
    sp.add_argument("--slit", required=True)
    sp.add_argument("--dcap", type=float, default=DEFAULTS["dcap"])
    common(sp)
    sp.set_defaults(func=cmd_drive)

    sp = sub.add_parser("coeffs", help="constant coefficients for disjoint slits")
    sp.add_argument("--slits", required=True)
    sp.add_argument("--tol", type=float, default=DEFAULTS["tol"])
    sp.add_argument("--steps", type=int, default=DEFAULTS["steps"])
    common(sp)
    sp.set_defaults(func=cmd_coeffs)

    sp = sub.add_parser("weld", help="probe the welded-hull criterion")
    sp.add_argument("--system", required=True)
    sp.add_argument("--grid", default=DEFAULTS["grid"])
    common(sp)
    sp.set_defaults(func=cmd_weld)

    sp = sub.add_parser("diag", help="local 1/2-Hoelder norms and verdicts")
    sp.add_argument("--driving", required=True)
    sp.add_argument("--window", type=float, default=DEFAULTS["window"])
    sp.add_argument("--lam", type=float, default=None,
                    help="weight for the 4*sqrt(lam) threshold (default 1)")
    common(sp)
    sp.set_defaults(func=cmd_diag)

    sp = sub.add_parser("hcap", help="half-plane capacity estimators")
    sp.add_argument("--slit", required=True)
    sp.add_argument("--method", choices=["chain", "moment", "mc", "hsiz"],
                    default="chain")
    sp.add_argument("--dcap", type=float, default=DEFAULTS["dcap"])
    sp.add_argument("--walkers", type=int, default=DEFAULTS["walkers"])
    sp.add_argument("--resolution", type=float, default=DEFAULTS["resolution"])
    sp.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    common(sp)
    sp.set_defaults(func=cmd_hcap)

    sp = sub.add_parser("steer", help="driving that steers through a point")
    sp.add_argument("--from", required=True, metavar="x,y")
    sp.add_argument("--to", required=True, metavar="x,y")
    common(sp)
    sp.set_defaults(func=cmd_steer)
    return p


def _apply_config(args):
    if getattr(args, "config", None):
        overrides = ser.load_json(args.config)
        for k, v in overrides.items():
            if k == "command":
                continue
            if not hasattr(args, k):
                raise DomainError(f"unknown config key {k!r}")
            setattr(args, k, v)
    if getattr(args, "save_config", None):
        text = json.dumps(_resolved_config(args), indent=2, sort_keys=True) + "\n"
        ser.write_atomic(args.save_config, text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.print_config:
        cfg = dict(DEFAULTS)
        cfg["threads"] = thread_count()
        sys.stdout.write(json.dumps(cfg, indent=2, sort_keys=True) + "\n")
        return 0
    if not getattr(args, "command", None):
        parser.print_help()
        return 2
    try:
        _apply_config(args)
        args.func(args)
        return 0
    except ConvergenceError as e:
        return _fail(args, e, 4)
    except _INPUT_ERRORS as e:
        return _fail(args, e, 2)
    except _NUMERIC_ERRORS as e:
        return _fail(args, e, 3)
    except LoewnerError as e:  # pragma: no cover - safety net
        return _fail(args, e, 3)


def _fail(args, err, code: int) -> int:
    if getattr(args, "error_json", False):
        doc = {"error": {"type": type(err).__name__, "message": str(err),
                         "exit_code": code}}
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        print(f"loewner: {type(err).__name__}: {err}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
