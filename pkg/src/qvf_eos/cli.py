"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 a ``check``
identity failed.
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field
import json
import math
from pathlib import Path
import sys

import numpy as np

from . import __version__
from .checks import run_checks
from .dielectric import Constant, Lorentz, MultiLorentz, PhysicalConstants, model_from_dict
from .eos import (
    GeometryConfig,
    Vacuum,
    filter_from_dict,
    polariton_spectrum,
    ratio_spectrum,
    time_correlation,
    vacuum_spectrum,
)
from .errors import BandEdge, QVFError
from .inversion import fit_lorentz, invert_ratio, synthesize_measurement
from .io import read_trace, render, write
from .polariton import mode_solutions
from .vacuum import partition_identity

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_CHECK = 0, 1, 2, 3

DEFAULT_GRIDS = {
    "omega": (0.01, 5.0, 1000),
    "tau": (-20.0, 20.0, 512),
    "k": (0.01, 3.0, 300),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    model: object
    constants: PhysicalConstants
    geometry: GeometryConfig
    filter: object
    grids: dict = field(default_factory=dict)
    format: str = "csv"
    output: str | None = None
    seed: int | None = None

    def grid(self, name):
        lo, hi, n = self.grids.get(name, DEFAULT_GRIDS[name])
        n = int(n)
        if n < 1 or (n > 1 and not hi > lo):
            raise UsageError(f"{name} grid must be non-empty and increasing, got {lo}:{hi}:{n}")
        return np.linspace(lo, hi, n)

    def meta(self, command, **extra):
        meta = {
            "command": command,
            "model": self.model.to_dict(),
            "units": self.constants.units,
            "version": __version__,
        }
        meta.update(extra)
        return meta


def parse_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must look like min:max:points, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def parse_oscillators(text):
    pairs = []
    for item in text.split(","):
        w, g = item.split(":")
        pairs.append((float(w), float(g)))
    return tuple(pairs)


def build_parser():
    parser = _Parser(prog="qvf-eos", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file mirroring the run configuration")
    common.add_argument("--model", choices=["constant", "lorentz", "multi"])
    common.add_argument("--eps-r", type=float)
    common.add_argument("--omega-x", type=float)
    common.add_argument("--g", type=float)
    common.add_argument("--oscillators", type=parse_oscillators, help="w1:g1,w2:g2,...")
    common.add_argument("--units", choices=["reduced", "si"])
    common.add_argument("--hbar", type=float)
    common.add_argument("--eps0", type=float)
    common.add_argument("--c", type=float)
    common.add_argument("--S", type=float)
    common.add_argument("--L", type=float)
    common.add_argument("--C", type=float)
    common.add_argument("--filter", choices=["identity", "gaussian", "rect"])
    common.add_argument("--t-p", type=float)
    common.add_argument("--omega-c", type=float)
    common.add_argument("--omega", type=parse_grid, help="min:max:points")
    common.add_argument("--tau", type=parse_grid, help="min:max:points")
    common.add_argument("--k", type=parse_grid, help="min:max:points")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--output", "-o")
    common.add_argument("--seed", type=int)

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("dispersion", parents=[common], help="branch frequencies over the k grid")
    sub.add_parser("hopfield", parents=[common], help="mode table with Hopfield coefficients")
    p = sub.add_parser("spectrum", parents=[common], help="correlation spectrum over the omega grid")
    p.add_argument("--source", choices=["polariton", "vacuum"], default="polariton")
    sub.add_parser("ratio", parents=[common], help="polariton/vacuum spectral ratio")
    p = sub.add_parser("timecorr", parents=[common], help="time correlation over the tau grid")
    p.add_argument("--source", choices=["polariton", "vacuum"], default="polariton")
    p.add_argument("--omega-max", type=float)
    sub.add_parser("nk", parents=[common], help="virtual photon population over the k grid")
    p = sub.add_parser("check", parents=[common], help="run the identity checks")
    p.add_argument("--fast", action="store_true", help="skip the time-correlation checks")
    p = sub.add_parser("invert", parents=[common], help="recover eps(omega) from a ratio trace")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--gap-threshold", type=float, default=0.02)
    p = sub.add_parser("fit", parents=[common], help="fit a Lorentz oscillator to a ratio trace")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--guess", type=lambda s: tuple(float(v) for v in s.split(",")), default=(1.2, 0.4),
                   help="omega_x,g")
    p.add_argument("--bounds", type=lambda s: tuple(float(v) for v in s.split(",")),
                   help="wx_lo,wx_hi,g_lo,g_hi")
    p = sub.add_parser("synth", parents=[common], help="synthetic noisy ratio measurement")
    p.add_argument("--sigma", type=float, default=0.0)
    p = sub.add_parser("reproduce-fig2", parents=[common], help="dispersion and ratio panels")
    p.add_argument("--output-dir", default="fig2")
    return parser


def _load_config(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc


def make_config(args):
    doc = _load_config(args.config) if args.config else {}
    model_doc = dict(doc.get("model", {}))
    if args.model:
        model_doc["kind"] = args.model
    for flag, key in (("eps_r", "eps_r"), ("omega_x", "omega_x"), ("g", "g")):
        if getattr(args, flag) is not None:
            model_doc[key] = getattr(args, flag)
    if args.oscillators is not None:
        model_doc["oscillators"] = args.oscillators
        model_doc.setdefault("kind", "multi")
    if args.command == "reproduce-fig2":
        model_doc = {"kind": "lorentz", "eps_r": 1.0, "omega_x": 1.0, "g": 0.5, **model_doc}
    model = model_from_dict(model_doc or {"kind": "lorentz"})

    units = (args.units or doc.get("units", "reduced")).lower()
    overrides = dict(doc.get("constants", {}))
    for name in ("hbar", "eps0", "c"):
        if getattr(args, name) is not None:
            overrides[name] = getattr(args, name)
    if units == "si":
        constants = PhysicalConstants.si(**overrides)
    elif units == "reduced":
        if any(v != 1.0 for v in overrides.values()):
            raise UsageError("constant overrides require --units si")
        constants = PhysicalConstants.reduced()
    else:
        raise UsageError(f"unknown units {units!r}")

    geometry_doc = dict(doc.get("geometry", {}))
    for name in ("S", "L", "C"):
        if getattr(args, name) is not None:
            geometry_doc[name] = getattr(args, name)
    geometry = GeometryConfig(**{k: float(v) for k, v in geometry_doc.items()})

    filter_doc = dict(doc.get("filter", {}))
    if args.filter:
        filter_doc["kind"] = args.filter
    if args.t_p is not None:
        filter_doc["t_p"] = args.t_p
    if args.omega_c is not None:
        filter_doc["omega_c"] = args.omega_c
    filter_doc.setdefault("kind", "gaussian")
    if filter_doc["kind"] == "gaussian":
        filter_doc.setdefault("t_p", 1.0 / model.reference_frequency)
    filt = filter_from_dict(filter_doc)

    grids = {name: tuple(v) for name, v in doc.get("grids", {}).items()}
    for name in ("omega", "tau", "k"):
        if getattr(args, name) is not None:
            grids[name] = getattr(args, name)

    fmt = args.format or doc.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {fmt!r}")
    output = args.output if args.output is not None else doc.get("output")
    seed = args.seed if args.seed is not None else doc.get("seed")
    return RunConfig(model, constants, geometry, filt, grids, fmt, output, seed)


def _emit(cfg, columns, rows, meta, stdout):
    write(render(columns, rows, cfg.format, meta), cfg.output, stdout)


def _branch_columns(n):
    if n == 1:
        return ["omega"]
    if n == 2:
        return ["omega_lower", "omega_upper"]
    return [f"omega_{i}" for i in range(n)]


def cmd_dispersion(cfg, args, stdout):
    columns, rows = _dispersion_table(cfg, cfg.grid("k"))
    _emit(cfg, columns, rows, cfg.meta("dispersion"), stdout)


def _dispersion_table(cfg, ks):
    rows = []
    n_branches = None
    for k in ks:
        modes = mode_solutions(cfg.model, k, cfg.constants)
        n_branches = len(modes)
        rows.append([k, *(m.omega for m in modes), modes[0].bare_frequency])
    return ["k", *_branch_columns(n_branches), "omega_bare"], rows


def cmd_hopfield(cfg, args, stdout):
    columns = ["k", "branch", "omega", "X", "Z", "v_g", "omega_bare", "epsilon"]
    rows = []
    for k in cfg.grid("k"):
        for m in mode_solutions(cfg.model, k, cfg.constants):
            rows.append([k, m.branch, m.omega, m.X, m.Z, m.v_g, m.bare_frequency, m.epsilon])
    _emit(cfg, columns, rows, cfg.meta("hopfield"), stdout)


def cmd_spectrum(cfg, args, stdout):
    omega = cfg.grid("omega")
    if args.source == "vacuum":
        values = vacuum_spectrum(cfg.constants, cfg.geometry, cfg.model.eps_r, cfg.filter, omega)
    else:
        values = np.empty_like(omega)
        for i, w in enumerate(omega):
            try:
                values[i] = polariton_spectrum(cfg.model, cfg.constants, cfg.geometry, cfg.filter, w)
            except BandEdge:
                values[i] = np.nan
    meta = cfg.meta("spectrum", source=args.source, filter=cfg.filter.to_dict(), S=cfg.geometry.S)
    _emit(cfg, ["omega", "value"], zip(omega, values), meta, stdout)


def cmd_ratio(cfg, args, stdout):
    trace = ratio_spectrum(cfg.model, cfg.grid("omega"))
    _emit(cfg, ["omega", "value"], zip(trace.omega, trace.values), cfg.meta("ratio"), stdout)


def cmd_timecorr(cfg, args, stdout):
    source = Vacuum(cfg.model.eps_r) if args.source == "vacuum" else cfg.model
    trace = time_correlation(source, cfg.constants, cfg.geometry, cfg.filter, cfg.grid("tau"), args.omega_max)
    meta = cfg.meta("timecorr", source=args.source, filter=cfg.filter.to_dict(),
                    omega_max=trace.meta["omega_max"], S=cfg.geometry.S)
    _emit(cfg, ["tau", "value"], zip(trace.tau, trace.values), meta, stdout)


def cmd_nk(cfg, args, stdout):
    rows = []
    for k in cfg.grid("k"):
        report = partition_identity(cfg.model, k, cfg.constants)
        rows.append([k, report.N_k, report.lhs, report.rhs, report.residual])
    _emit(cfg, ["k", "value", "lhs", "rhs", "residual"], rows, cfg.meta("nk"), stdout)


def cmd_check(cfg, args, stdout):
    seed = cfg.seed if cfg.seed is not None else 0
    results = run_checks(cfg.model, cfg.constants, cfg.geometry, cfg.filter, seed,
                         include_fourier=not args.fast)
    for result in results:
        print(result.line(), file=stdout)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed", file=stdout)
    return EXIT_CHECK if failed else EXIT_OK


def _reference_eps_r(args):
    return args.eps_r


def cmd_invert(cfg, args, stdout):
    trace = read_trace(args.input, _reference_eps_r(args))
    result = invert_ratio(trace, args.gap_threshold)
    meta = cfg.meta("invert", eps_r=trace.eps_r, gaps=[list(g) for g in result.gaps])
    meta.pop("model")
    _emit(cfg, ["omega", "value"], zip(result.omega, result.epsilon), meta, stdout)


def cmd_fit(cfg, args, stdout):
    trace = read_trace(args.input, _reference_eps_r(args))
    kwargs = {}
    if args.bounds:
        if len(args.bounds) != 4:
            raise UsageError("--bounds takes wx_lo,wx_hi,g_lo,g_hi")
        kwargs["bounds"] = (args.bounds[:2], args.bounds[2:])
    if len(args.guess) != 2:
        raise UsageError("--guess takes omega_x,g")
    result = fit_lorentz(trace, args.guess, **kwargs)
    rows = [
        ["eps_r", result.eps_r, 0.0],
        ["omega_x", result.omega_x, result.stderr[0]],
        ["g", result.g, result.stderr[1]],
    ]
    meta = cfg.meta("fit", rss=result.rss, iterations=result.iterations,
                    converged=result.converged, gradient_norm=result.gradient_norm)
    meta.pop("model")
    _emit(cfg, ["parameter", "value", "stderr"], rows, meta, stdout)


def cmd_synth(cfg, args, stdout):
    trace = synthesize_measurement(cfg.model, cfg.grid("omega"), args.sigma, cfg.seed)
    meta = cfg.meta("synth", sigma=args.sigma, seed=cfg.seed, eps_r=cfg.model.eps_r)
    _emit(cfg, ["omega", "value"], zip(trace.omega, trace.ratio), meta, stdout)


def cmd_reproduce_fig2(cfg, args, stdout):
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    scale = cfg.model.reference_frequency
    # k grid in units of omega_x / c, containing the crossing point Omega_k = omega_x exactly
    ks = np.arange(1, 301) / 100.0 * scale * math.sqrt(cfg.model.eps_r) / cfg.constants.c
    if "k" in cfg.grids:
        ks = cfg.grid("k")
    columns, rows = _dispersion_table(cfg, ks)
    ext = cfg.format
    path_a = out / f"fig2a_dispersion.{ext}"
    path_a.write_text(render(columns, rows, cfg.format, cfg.meta("reproduce-fig2", panel="a")))

    omega = cfg.grid("omega") if "omega" in cfg.grids else np.linspace(0.01, 3.0, 300) * scale
    ratio = ratio_spectrum(cfg.model, omega).values
    rows = [[w, r, 1.0] for w, r in zip(omega, ratio)]
    path_b = out / f"fig2b_ratio.{ext}"
    path_b.write_text(render(["omega", "value", "uncoupled"], rows, cfg.format,
                             cfg.meta("reproduce-fig2", panel="b")))
    print(path_a, file=stdout)
    print(path_b, file=stdout)


COMMANDS = {
    "dispersion": cmd_dispersion,
    "hopfield": cmd_hopfield,
    "spectrum": cmd_spectrum,
    "ratio": cmd_ratio,
    "timecorr": cmd_timecorr,
    "nk": cmd_nk,
    "check": cmd_check,
    "invert": cmd_invert,
    "fit": cmd_fit,
    "synth": cmd_synth,
    "reproduce-fig2": cmd_reproduce_fig2,
}


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = make_config(args)
        code = COMMANDS[args.command](cfg, args, stdout)
        return EXIT_OK if code is None else code
    except UsageError as exc:
        print(f"qvf-eos: usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except QVFError as exc:
        print(f"qvf-eos: numerical failure: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError, KeyError, OSError) as exc:
        print(f"qvf-eos: usage error: {exc}", file=stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


__all__ = ["run", "main", "RunConfig", "Constant", "Lorentz", "MultiLorentz"]
