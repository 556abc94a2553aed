"""Command-line front end.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
4 output path not writable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import warnings

import numpy as np

from . import coefficients as betamod
from .config import ConfigError, RunConfig, deep_merge
from .potential import potential
from .stability import scan, stable_orientation

log = logging.getLogger("casimir_orient")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_OUTPUT = 0, 2, 3, 4

_UNSET = object()


class OutputError(OSError):
    pass


def _radius_arg(text: str):
    if text.lower() in ("inf", "+inf", "none"):
        return None
    if text.lower() == "-inf":
        return "-inf"
    return float(text)


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("particle")
    g.add_argument("--n3", type=float, help="axial depolarizing factor")
    g.add_argument("--volume", type=float, help="particle volume in um^3")
    g.add_argument("--R", type=float, help="equatorial semi-axis in um")
    g.add_argument("--L", type=float, help="full length along the symmetry axis in um")
    g.add_argument("--material", help="preset name: gold-PC or SiO2-hough")
    g.add_argument(
        "--oscillators",
        nargs=4,
        type=float,
        metavar=("C_UV", "C_IR", "W_UV", "W_IR"),
        help="inline two-oscillator dielectric (frequencies in rad/s)",
    )
    g = p.add_argument_group("surface and state")
    g.add_argument("--d", type=float, help="separation in um")
    g.add_argument("--R1", type=_radius_arg, default=_UNSET, help="first principal radius in um (inf for flat)")
    g.add_argument("--R2", type=_radius_arg, default=_UNSET, help="second principal radius in um (inf for flat)")
    g.add_argument("--third-deriv", nargs=2, type=float, metavar=("GX", "GY"))
    g.add_argument("--theta", type=float, help="polar angle of the symmetry axis, degrees")
    g.add_argument("--phi", type=float, help="azimuth of the symmetry axis, degrees")
    g.add_argument("--T", type=float, help="temperature in K")
    g = p.add_argument_group("numerics")
    g.add_argument("--rel-tol", type=float, help="Matsubara truncation tolerance")
    g.add_argument("--quad-tol", type=float, help="T=0 quadrature tolerance")
    g.add_argument("--validity-threshold", type=float, help="warn when |d/R| exceeds this")
    p.add_argument("--config", help="JSON configuration file; flags override it")
    p.add_argument("--output", "-o", help="write result to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="casimir-orient",
        description="Casimir-Polder orientation of spheroidal nanoparticles near curved conductors.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("beta", help="tabulate the curvature coefficient functions as CSV")
    p.add_argument("--P", choices=["E", "M"])
    p.add_argument("--p", type=int, choices=[0, 2, 3, 4])
    p.add_argument("--q", type=int)
    p.add_argument("--all", action="store_true", help="every valid index")
    p.add_argument("--xi", type=float, nargs="+", default=None)
    p.add_argument("--xi-grid", type=float, nargs=3, metavar=("START", "STOP", "COUNT"))
    p.add_argument("--output", "-o")

    p = sub.add_parser("potential", help="evaluate the potential at one configuration")
    _add_model_flags(p)
    p.add_argument("--format", choices=["text", "json"])

    p = sub.add_parser("scan", help="compute a stability diagram")
    _add_model_flags(p)
    p.add_argument("--axis1", nargs=4, metavar=("NAME", "START", "STOP", "COUNT"))
    p.add_argument("--axis2", nargs=4, metavar=("NAME", "START", "STOP", "COUNT"))
    p.add_argument(
        "--fixed",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="fixed scan parameter (d_um, R1_um, R2_um, d_over_R1, R1_over_R2, T)",
    )
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--threads", type=int, help="worker threads for the scan")
    return parser


def _flag_overrides(args: argparse.Namespace) -> dict:
    doc: dict = {}

    def put(section, key, value):
        if value is not None:
            doc.setdefault(section, {})[key] = value

    put("particle", "n3", args.n3)
    put("particle", "volume_um3", args.volume)
    put("particle", "R_um", args.R)
    put("particle", "L_um", args.L)
    put("particle", "material", args.material)
    if args.oscillators is not None:
        c_uv, c_ir, w_uv, w_ir = args.oscillators
        put("particle", "material", {"C_uv": c_uv, "C_ir": c_ir, "omega_uv": w_uv, "omega_ir": w_ir})
    put("patch", "d_um", args.d)
    if args.R1 is not _UNSET:
        doc.setdefault("patch", {})["R1_um"] = args.R1
    if args.R2 is not _UNSET:
        doc.setdefault("patch", {})["R2_um"] = args.R2
    put("patch", "third_deriv", args.third_deriv)
    put("orientation", "theta_deg", args.theta)
    put("orientation", "phi_deg", args.phi)
    if args.T is not None:
        doc["temperature_K"] = args.T
    put("tolerances", "matsubara_rel_tol", args.rel_tol)
    put("tolerances", "quad_tol", args.quad_tol)
    put("tolerances", "validity_threshold", args.validity_threshold)
    put("output", "path", args.output)
    put("output", "format", args.format)
    if getattr(args, "axis1", None) or getattr(args, "axis2", None) or getattr(args, "fixed", None):
        grid: dict = {}
        for key in ("axis1", "axis2"):
            spec = getattr(args, key)
            if spec:
                name, start, stop, count = spec
                try:
                    grid[key] = {"name": name, "start": float(start), "stop": float(stop), "count": int(count)}
                except ValueError:
                    raise ConfigError(f"--{key}: START/STOP must be numbers and COUNT an integer") from None
        fixed = {}
        for item in args.fixed:
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"--fixed expects KEY=VALUE, got {item!r}")
            fixed[key] = _radius_arg(value) if key in ("R1_um", "R2_um") else float(value)
        if fixed:
            grid["fixed"] = fixed
        doc["grid"] = grid
    return doc


def load_config(args: argparse.Namespace) -> RunConfig:
    base: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                base = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {args.config}: {exc}") from None
        if isinstance(base, dict) and isinstance(base.get("config"), dict):
            base = base["config"]
    doc = deep_merge(base, _flag_overrides(args))
    doc["command"] = args.command
    return RunConfig.from_dict(doc)


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from None


def cmd_beta(args: argparse.Namespace) -> int:
    if args.all:
        indices = list(betamod.all_indices())
    else:
        if args.P is None or args.p is None:
            raise ConfigError("beta: give --P and --p (and --q where needed), or --all")
        try:
            indices = [betamod.BetaIndex(args.P, args.p, args.q)]
        except ValueError as exc:
            raise ConfigError(f"beta: {exc}") from None
    if args.xi_grid is not None:
        start, stop, count = args.xi_grid
        xs = np.linspace(start, stop, int(count))
    else:
        xs = np.asarray(args.xi if args.xi is not None else [0.0], dtype=float)
    if np.any(xs < 0):
        raise ConfigError("beta: xi must be non-negative")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["P", "p", "q", "xi", "value"])
    for idx in indices:
        values = betamod.beta(idx, xs)
        for x, v in zip(xs, values):
            writer.writerow([idx.P, idx.p, "" if idx.q is None else idx.q, repr(float(x)), repr(float(v))])
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


def run_potential(config: RunConfig) -> dict:
    """Evaluate one configuration; returns the JSON-ready report."""
    particle = config.particle()
    patch = config.patch()
    thermal = config.thermal()
    tol = config.tolerances
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        bd = potential(particle, patch, config.orientation(), thermal, **tol)
        axis = None
        if patch.symmetric:
            axis, _ = stable_orientation(particle, patch, thermal, **tol)
    result = bd.as_dict()
    result["stable_axis"] = None if axis is None else axis.value
    result["warnings"] = sorted({str(w.message) for w in caught})
    return {"config": config.to_dict(), "result": result}


def _format_text(report: dict) -> str:
    r = report["result"]
    lines = [
        f"U_reduced   = {r['U_reduced']:.12g}",
        f"U_SI [J]    = {r['U_SI']:.12g}",
        f"A           = {r['A']:.12g}",
        f"B           = {r['B']:.12g}",
        f"C           = {r['C']:.12g}",
        f"D           = {r['D']:.12g}",
        f"stable axis = {r['stable_axis'] or 'n/a (asymmetric surface)'}",
    ]
    if r["E_x"] or r["E_y"]:
        lines.insert(6, f"E_x, E_y    = {r['E_x']:.12g}, {r['E_y']:.12g}")
    lines += [f"warning: {w}" for w in r["warnings"]]
    return "\n".join(lines) + "\n"


def cmd_potential(config: RunConfig) -> int:
    report = run_potential(config)
    fmt = config.data["output"].get("format", "text")
    if fmt == "csv":
        raise ConfigError("potential: output format must be text or json")
    text = json.dumps(report, indent=2) + "\n" if fmt == "json" else _format_text(report)
    for w in report["result"]["warnings"]:
        log.warning(w)
    _emit(text, config.data["output"]["path"])
    return EXIT_OK


def run_scan(config: RunConfig, n_jobs=None):
    axis1, axis2, fixed = config.grid()
    return scan(axis1, axis2, config.particle(), fixed, n_jobs=n_jobs, **config.tolerances)


def cmd_scan(config: RunConfig, n_jobs=None) -> int:
    grid = run_scan(config, n_jobs)
    grid.metadata["config"] = config.to_dict()
    fmt = config.data["output"].get("format", "csv")
    if fmt == "text":
        raise ConfigError("scan: output format must be csv or json")
    if fmt == "json":
        doc = grid.to_json_dict()
        doc["config"] = config.to_dict()
        text = json.dumps(doc, indent=1) + "\n"
    else:
        text = grid.to_csv()
    _emit(text, config.data["output"]["path"])
    fr = grid.fractions()
    summary = ", ".join(f"{k}: {v:.3f}" for k, v in fr.items())
    print(f"region fractions -> {summary}; failed cells: {len(grid.errors)}", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.command == "beta":
            return cmd_beta(args)
        config = load_config(args)
        if args.command == "potential":
            return cmd_potential(config)
        return cmd_scan(config, n_jobs=args.threads)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    except (ValueError, ArithmeticError, TypeError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
