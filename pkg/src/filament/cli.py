"""
Command-line front end.

Every subcommand reads its options from (in increasing precedence) built-in
defaults, a JSON ``--config`` file and the command line.  ``--emit-config``
prints the resolved configuration and exits.  Exit codes: 0 success,
1 validation error, 2 numerical failure; errors produce one line on stderr.
"""

import argparse
import json
import os
import sys
import warnings

import numpy as np

from . import bloch, finitegap, jsonio
from .curves import frenet_data, read_curve_csv, resample_arclength, write_curve_csv
from .errors import FilamentError, NumericalError, ValidationError
from .hasimoto import (ReconstructionConfig, closure_test_frame, gauge_shift,
                       hasimoto_forward, periodizing_shift, potential_to_json,
                       read_potential, reconstruct_curve)

DEFAULTS = {
    "hasimoto": {"input": None, "out": "potential.json", "allow_open": False, "theta0": 0.0},
    "gauge": {"input": None, "out": "potential_gauged.json", "alpha": None},
    "spectrum": {"input": None, "out": "spectrum.json", "scan": "scan.csv",
                 "lambda_min": -3.0, "lambda_max": 3.0, "grid": 1000},
    "reconstruct": {"input": None, "out": "curve.csv", "report": None, "lambda0": 0.0},
    "closure": {"input": None, "out": None, "lambda0": 0.0},
    "deform": {"input": None, "out": "trajectory.jsonl", "controls": None,
               "controls_table": None, "xi_end": 0.5, "steps": 200, "filament": False,
               "renormalize": True, "tol": 1e-6},
    "surface-from-constant": {"out": "surface.json", "c": 1.0, "open_gap": None,
                              "eps": 0.1, "seed": 0},
}
COMMON = {"threads": None}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"usage: {message}")


def _parser():
    p = _Parser(prog="filament", description="Spectral tools for closed vortex filaments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    S = argparse.SUPPRESS

    def add(name, help_):
        sp = sub.add_parser(name, help=help_, argument_default=S)
        sp.add_argument("--config", help="JSON file with option values")
        sp.add_argument("--emit-config", action="store_true", default=False,
                        help="print the resolved configuration and exit")
        sp.add_argument("--threads", type=int, help="worker threads for spectral scans")
        sp.add_argument("-o", "--out", help="output path")
        return sp

    sp = add("hasimoto", "curve CSV -> potential JSON")
    sp.add_argument("input", nargs="?")
    sp.add_argument("--allow-open", action="store_true", dest="allow_open")
    sp.add_argument("--theta0", type=float)

    sp = add("gauge", "multiply the potential by exp(i alpha x)")
    sp.add_argument("input", nargs="?")
    sp.add_argument("--alpha", type=float, help="default: the shift that makes q periodic")

    sp = add("spectrum", "discriminant scan and real double points")
    sp.add_argument("input", nargs="?")
    sp.add_argument("--lambda-min", type=float, dest="lambda_min")
    sp.add_argument("--lambda-max", type=float, dest="lambda_max")
    sp.add_argument("--grid", type=int)
    sp.add_argument("--scan", help="CSV path for the discriminant scan")

    for name, help_ in (("reconstruct", "potential -> curve CSV and closure report"),
                        ("closure", "spectral and geometric closure report")):
        sp = add(name, help_)
        sp.add_argument("input", nargs="?")
        sp.add_argument("--lambda0", type=float)
        if name == "reconstruct":
            sp.add_argument("--report", help="closure report path (default stdout)")

    sp = add("deform", "isoperiodic deformation of a spectral surface")
    sp.add_argument("input", nargs="?")
    sp.add_argument("--controls", help="comma-separated constants c_1,...,c_{g+1}")
    sp.add_argument("--controls-table", dest="controls_table",
                    help="JSON list of [xi, [c_1, ...]] rows, piecewise constant")
    sp.add_argument("--xi-end", type=float, dest="xi_end")
    sp.add_argument("--steps", type=int)
    sp.add_argument("--filament", action="store_true")
    sp.add_argument("--no-renormalize", action="store_false", dest="renormalize")
    sp.add_argument("--tol", type=float)

    sp = add("surface-from-constant", "genus-0 surface of a constant potential")
    sp.add_argument("--c", type=float)
    sp.add_argument("--open-gap", type=int, dest="open_gap",
                    help="open a gap at the double point sqrt(n^2 - c^2) (genus 1)")
    sp.add_argument("--eps", type=float)
    sp.add_argument("--seed", type=int)
    return p


def resolve(argv):
    args = vars(_parser().parse_args(argv))
    cmd = args.pop("command")
    emit = args.pop("emit_config", False)
    cfg = dict(COMMON, **DEFAULTS[cmd])
    path = args.pop("config", None)
    if path:
        try:
            with open(path) as fh:
                from_file = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {path}: {exc}") from None
        unknown = set(from_file) - set(cfg) - {"command"}
        if unknown:
            raise ValidationError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if from_file.get("command", cmd) != cmd:
            raise ValidationError(f"config is for '{from_file['command']}', not '{cmd}'")
        cfg.update({k: v for k, v in from_file.items() if k != "command"})
    cfg.update(args)
    return cmd, cfg, emit


def _check(cfg):
    if cfg.get("threads") is not None and cfg["threads"] < 1:
        raise ValidationError("--threads must be positive")
    for key in ("grid", "steps"):
        if key in cfg and (cfg[key] is None or int(cfg[key]) < 2):
            raise ValidationError(f"--{key} must be at least 2")
    if cfg.get("tol") is not None and cfg["tol"] <= 0:
        raise ValidationError("tolerances must be positive")
    if "input" in cfg and not cfg["input"]:
        raise ValidationError("missing input file")


def _pair(z):
    return [float(np.real(z)), float(np.imag(z))]


def cmd_hasimoto(cfg):
    curve = read_curve_csv(cfg["input"])
    if not curve.closed:
        if not cfg["allow_open"]:
            raise ValidationError("curve not closed (pass --allow-open for a quasi-periodic piece)")
    else:
        curve = resample_arclength(curve)
    q = hasimoto_forward(frenet_data(curve), cfg["theta0"])
    out = potential_to_json(q)
    out["suggested_alpha"] = periodizing_shift(q)
    out["length_scale"] = curve.scale
    jsonio.dump(out, cfg["out"])


def cmd_gauge(cfg):
    q = read_potential(cfg["input"])
    alpha = periodizing_shift(q) if cfg["alpha"] is None else cfg["alpha"]
    jsonio.dump(potential_to_json(gauge_shift(q, alpha)), cfg["out"])


def cmd_spectrum(cfg):
    q = read_potential(cfg["input"])
    lo, hi = float(cfg["lambda_min"]), float(cfg["lambda_max"])
    lams, delta = bloch.discriminant_scan(q, np.linspace(lo, hi, int(cfg["grid"])),
                                          threads=cfg["threads"])
    bloch.write_scan_csv(cfg["scan"], lams, delta)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = bloch.spectrum_report(q, (lo, hi), threads=cfg["threads"])
    for w in caught:
        print(f"filament: warning: {w.message}", file=sys.stderr)
    bloch.write_spectrum_json(cfg["out"], report)


def _closure_report(q, lam0):
    spec = bloch.closure_check(q, lam0)
    geo = closure_test_frame(q, ReconstructionConfig(lambda0=lam0))
    return {
        "lambda0": lam0,
        "verdict": spec.verdict.value,
        "spectral": {"is_double_point": spec.is_double_point, "sign": spec.sign,
                     "a": _pair(spec.a), "b": _pair(spec.b), "gap": spec.gap,
                     "dp_dlambda": spec.dp_dlambda},
        "geometric": {"frame_periodic": geo.frame_periodic, "curve_closed": geo.curve_closed,
                      "gap": [float(x) for x in geo.gap],
                      "gap_norm": float(np.linalg.norm(geo.gap)),
                      "frame_defect": geo.frame_defect},
    }


def _emit(obj, path):
    if path:
        jsonio.dump(obj, path)
    else:
        print(jsonio.dumps(obj))


def cmd_reconstruct(cfg):
    q = read_potential(cfg["input"])
    lam0 = float(cfg["lambda0"])
    report = _closure_report(q, lam0)
    rec = reconstruct_curve(q, ReconstructionConfig(lambda0=lam0))
    curve = rec.curve
    if report["verdict"] == bloch.Verdict.CLOSED.value:
        curve = type(curve)(curve.points, closed=True)
    write_curve_csv(cfg["out"], curve)
    _emit(report, cfg["report"])


def cmd_closure(cfg):
    q = read_potential(cfg["input"])
    _emit(_closure_report(q, float(cfg["lambda0"])), cfg["out"])


def _parse_controls(text):
    try:
        return [complex(t.strip().replace(" ", "")) for t in str(text).split(",")]
    except ValueError:
        raise ValidationError(f"cannot parse controls '{text}'") from None


def _table_callback(table, filament):
    try:
        rows = sorted((float(xi), [complex(*c) if isinstance(c, list) else complex(c) for c in cs])
                      for xi, cs in table)
    except (TypeError, ValueError):
        raise ValidationError("controls table rows must be [xi, [c_1, ...]]") from None

    def cb(xi, state):
        current = rows[0][1]
        for start, cs in rows:
            if xi + 1e-12 >= start:
                current = cs
        return current
    return cb


def cmd_deform(cfg):
    diff, alphas = finitegap.read_surface(cfg["input"])
    g1 = diff.genus + 1
    table = cfg["controls_table"]
    if isinstance(table, str):
        try:
            with open(table) as fh:
                table = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read controls table: {exc}") from None
    if table is not None:
        callback = _table_callback(table, cfg["filament"])
        controls = callback(0.0, None)
    elif cfg["controls"] is not None:
        callback, controls = None, _parse_controls(cfg["controls"])
    else:
        callback, controls = None, [0.0] * g1
    if len(controls) != g1:
        raise ValidationError(f"genus {diff.genus} needs {g1} controls, got {len(controls)}")
    if cfg["filament"] and abs(np.imag(alphas[-1])) > finitegap.REAL_TOL:
        raise ValidationError("no real quasimomentum zero designated (alpha_{g+1} is complex)")
    state = finitegap.initial_state(diff, alphas, controls, cfg["filament"])
    traj = finitegap.integrate_flow(state, cfg["xi_end"], int(cfg["steps"]),
                                    renormalize=cfg["renormalize"], tol=cfg["tol"],
                                    callback=callback)
    with open(cfg["out"], "w") as fh:
        for s in traj:
            fh.write(jsonio.dumps(s.to_json()) + "\n")


def cmd_surface_from_constant(cfg):
    c = float(cfg["c"])
    if cfg["open_gap"] is None:
        _, diff = finitegap.surface_from_constant_potential(c)
        alphas = None
    else:
        diff, alphas = finitegap.genus1_filament_start(
            c, int(cfg["open_gap"]), float(cfg["eps"]), seed=cfg["seed"])
    jsonio.dump(finitegap.surface_to_json(diff, alphas), cfg["out"])


COMMANDS = {
    "hasimoto": cmd_hasimoto,
    "gauge": cmd_gauge,
    "spectrum": cmd_spectrum,
    "reconstruct": cmd_reconstruct,
    "closure": cmd_closure,
    "deform": cmd_deform,
    "surface-from-constant": cmd_surface_from_constant,
}


def _one_line(exc):
    return " ".join(str(exc).split())


def main(argv=None):
    try:
        cmd, cfg, emit = resolve(sys.argv[1:] if argv is None else argv)
        if emit:
            print(jsonio.dumps({"command": cmd, **cfg}))
            return 0
        _check(cfg)
        if cfg.get("threads") is not None:
            os.environ["FILAMENT_THREADS"] = str(int(cfg["threads"]))
        COMMANDS[cmd](cfg)
    except NumericalError as exc:
        print(f"filament: numerical error: {_one_line(exc)}", file=sys.stderr)
        return 2
    except (ValidationError, FilamentError) as exc:
        print(f"filament: error: {_one_line(exc)}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"filament: error: {_one_line(exc)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
