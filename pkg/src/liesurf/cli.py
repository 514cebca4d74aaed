"""Command-line pipeline: solve, evolve, analyze, transform, export.

Option precedence is built-in defaults, then a flat JSON --config file,
then explicit flags.  Exit codes partition failures by stage: 0 success,
1 configuration or input files, 2 curvature solver, 3 evolution,
4 surface analysis, 5 transform construction.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from . import io as lio
from .analysis import analyze_surface
from .elastica import (
    ElasticaParams,
    first_integral,
    integrate_frame,
    legendre_lift,
    solve_curvature,
)
from .evolution import (
    evolve_surface,
    integrate_evolution,
    rotating_plane_complex,
    rotating_sphere_center_complex,
)
from .ribaucour import channel_partner_chart, ribaucour_evolve, verify_ribaucour
from .spaceforms import euclidean_frame

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_EVOLUTION = 3
EXIT_ANALYSIS = 4
EXIT_TRANSFORM = 5

CLOSURE_TOL = 1e-6


class ConfigError(ValueError):
    """Bad option value, bad config file, or missing required input."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems share the config exit code
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _fail(code: int, message) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _with_hint(exc: ValueError) -> str:
    msg = str(exc)
    if "lost the group" in msg:
        msg += " (try more --substeps or a finer --n-v)"
    return msg


# ---------------------------------------------------------------------------
# option resolution: defaults < config file < flags

_SPECS: dict[str, dict[str, tuple[str, object]]] = {
    "elastica": {
        "chi": ("float", 1.0),
        "kappa": ("float", 0.0),
        "mu": ("float", -1.0),
        "lam": ("float", 0.0),
        "k0": ("float", 2.0),
        "dk0": ("float", 0.0),
        "length": ("float", 10.0),
        "step": ("float", 1e-3),
        "renorm_every": ("int", 100),
        "out": ("path", None),
    },
    "evolve": {
        "curve": ("path", None),
        "complex": ("str", "rotating-plane"),
        "v_start": ("float", 0.0),
        "v_end": ("float", 2.0 * math.pi),
        "n_v": ("int", 200),
        "closed_v": ("bool", False),
        "ring_radius": ("float", 2.0),
        "sphere_radius": ("float", 1.0),
        "substeps": ("int", 1),
        "contact_tol": ("float", 1e-8),
        "reg_tol": ("float", 1e-6),
        "out": ("path", None),
    },
    "analyze": {
        "surface": ("path", None),
        "align_tol": ("float", 0.05),
        "envelope_rel_tol": ("float", 1e-4),
        "pde_tol": ("float", 1e-4),
        "out": ("path", None),
    },
    "ribaucour": {
        "curve": ("path", None),
        "complex": ("str", "rotating-plane"),
        "v_start": ("float", 0.0),
        "v_end": ("float", 2.0 * math.pi),
        "n_v": ("int", 200),
        "closed_v": ("bool", False),
        "ring_radius": ("float", 2.0),
        "sphere_radius": ("float", 1.0),
        "substeps": ("int", 1),
        "center_x": ("float", 0.5),
        "center_y": ("float", 0.7),
        "radius": ("float", 4.0),
        "incidence_tol": ("float", 1e-8),
        "margin_tol": ("float", 1e-3),
        "out_surface": ("path", None),
        "out_partner": ("path", None),
        "out_pair": ("path", None),
        "out_report": ("path", None),
    },
    "export": {
        "surface": ("path", None),
        "format": ("str", "obj"),
        "tol": ("float", 1e-8),
        "out": ("path", None),
    },
}

_REQUIRED = {
    "elastica": ("out",),
    "evolve": ("curve", "out"),
    "analyze": ("surface", "out"),
    "ribaucour": ("curve", "out_surface", "out_partner"),
    "export": ("surface", "out"),
}

_CHOICES = {
    "complex": ("rotating-plane", "rotating-sphere-center"),
    "format": ("obj", "ply"),
}


def _coerce(key: str, kind: str, value):
    try:
        if kind == "float":
            out = float(value)
            if not math.isfinite(out):
                raise ValueError
            return out
        if kind == "int":
            if isinstance(value, bool) or int(value) != value:
                raise ValueError
            return int(value)
        if kind == "bool":
            if not isinstance(value, bool):
                raise ValueError
            return value
        if not isinstance(value, str):
            raise ValueError
    except (TypeError, ValueError):
        raise ConfigError(f"option '{key}' expects a {kind}, got {value!r}") from None
    if key in _CHOICES and value not in _CHOICES[key]:
        raise ConfigError(f"option '{key}' must be one of {_CHOICES[key]}")
    return value


def _resolve(ns: argparse.Namespace) -> dict:
    spec = _SPECS[ns.command]
    config: dict = {}
    if ns.config is not None:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(config, dict):
            raise ConfigError("config must be a JSON object of option values")
        unknown = sorted(set(config) - set(spec))
        if unknown:
            raise ConfigError(f"unknown config keys for '{ns.command}': {unknown}")

    out = {}
    for key, (kind, default) in spec.items():
        value = getattr(ns, key, None)
        if value is None and key in config:
            value = config[key]
        if value is None:
            value = default
        out[key] = default if value is None else _coerce(key, kind, value)
    for key in _REQUIRED[ns.command]:
        if out[key] is None:
            raise ConfigError(f"missing required option '--{key.replace('_', '-')}'")
    return out


def _positive(cfg: dict, *keys: str) -> None:
    for key in keys:
        if not cfg[key] > 0.0:
            raise ConfigError(f"option '{key}' must be positive (got {cfg[key]})")


# ---------------------------------------------------------------------------
# shared pipeline pieces

def _read_curve(path: str):
    try:
        return lio.read_curve(path)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read curve file: {exc}") from None


def _read_surface(path: str):
    try:
        return lio.read_surface(path)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read surface file: {exc}") from None


def _build_complex(cfg: dict):
    closed = cfg["closed_v"]
    n, v0, v1 = cfg["n_v"], cfg["v_start"], cfg["v_end"]
    if n < 4:
        raise ConfigError("n_v must be at least 4")
    if not v1 > v0:
        raise ConfigError("v_end must exceed v_start")
    if closed:
        v = v0 + (v1 - v0) * np.arange(n) / n
    else:
        v = np.linspace(v0, v1, n)
    if cfg["complex"] == "rotating-plane":
        return rotating_plane_complex(v, closed=closed)
    _positive(cfg, "ring_radius", "sphere_radius")
    return rotating_sphere_center_complex(
        v, cfg["ring_radius"], cfg["sphere_radius"], closed=closed
    )


def _evolved_grid(cfg: dict, curve):
    """Complex + transport + sweep; downgrades the v-wrap flag when the
    transported frame fails to close within CLOSURE_TOL."""
    cc = _build_complex(cfg)
    emap = integrate_evolution(cc, substeps=cfg["substeps"])
    grid = evolve_surface(
        emap, curve, contact_tol=cfg["contact_tol"], reg_tol=cfg["reg_tol"]
    )
    if grid.closed_v and (
        emap.monodromy_defect is None or emap.monodromy_defect > CLOSURE_TOL
    ):
        shown = "unavailable" if emap.monodromy_defect is None else (
            f"{emap.monodromy_defect:.3e}"
        )
        print(
            f"note: monodromy defect {shown} exceeds {CLOSURE_TOL:.0e}; "
            "marking the v-direction open"
        )
        grid = dataclasses.replace(grid, closed_v=False)
    return emap, grid


# ---------------------------------------------------------------------------
# commands

def _cmd_elastica(cfg: dict) -> int:
    _positive(cfg, "step", "length")
    if cfg["renorm_every"] < 1:
        raise ConfigError("renorm_every must be at least 1")
    params = ElasticaParams(
        chi=cfg["chi"],
        kappa=cfg["kappa"],
        mu=cfg["mu"],
        lam=cfg["lam"],
        k0=cfg["k0"],
        dk0=cfg["dk0"],
        length=cfg["length"],
        step=cfg["step"],
        renorm_every=cfg["renorm_every"],
    )
    try:
        sol = solve_curvature(params)
        geo = integrate_frame(params, sol.k)
    except ValueError as exc:
        return _fail(EXIT_SOLVER, exc)
    curve = legendre_lift(geo)
    echo = {k: cfg[k] for k in ("chi", "kappa", "mu", "lam", "k0", "dk0", "length", "step")}
    lio.write_curve(cfg["out"], curve, k=sol.k, first_integral=first_integral(sol),
                    params=echo)
    print(f"wrote curve {cfg['out']} ({curve.u.size} samples)")
    return EXIT_OK


def _cmd_evolve(cfg: dict) -> int:
    if cfg["substeps"] < 1:
        raise ConfigError("substeps must be at least 1")
    _positive(cfg, "contact_tol", "reg_tol")
    curve, _ = _read_curve(cfg["curve"])
    try:
        emap, grid = _evolved_grid(cfg, curve)
    except ValueError as exc:
        return _fail(EXIT_EVOLUTION, _with_hint(exc))
    lio.write_surface(cfg["out"], grid)
    print(
        f"wrote surface {cfg['out']} ({grid.shape[0]}x{grid.shape[1]}, "
        f"ortho defect {emap.ortho_defect:.3e}, "
        f"parallelism defect {emap.parallelism_defect():.3e})"
    )
    return EXIT_OK


def _cmd_analyze(cfg: dict) -> int:
    _positive(cfg, "align_tol", "envelope_rel_tol", "pde_tol")
    grid = _read_surface(cfg["surface"])
    try:
        pd, _, report = analyze_surface(
            grid,
            euclidean_frame(),
            align_tol=cfg["align_tol"],
            envelope_rel_tol=cfg["envelope_rel_tol"],
            pde_tol=cfg["pde_tol"],
        )
    except ValueError as exc:
        return _fail(EXIT_ANALYSIS, exc)
    text = report.to_text()
    fields = dataclasses.asdict(report)
    fields["channel_families"] = list(pd.channel_families or ())
    fields["normalization_residuals"] = dict(pd.normalization_residuals or {})
    lio.write_report(cfg["out"], text, fields)
    sys.stdout.write(text)
    print(f"wrote report {cfg['out']}")
    return EXIT_OK


def _cmd_ribaucour(cfg: dict) -> int:
    if cfg["substeps"] < 1:
        raise ConfigError("substeps must be at least 1")
    _positive(cfg, "incidence_tol", "margin_tol")
    cfg = dict(cfg, contact_tol=1e-8, reg_tol=1e-6)
    curve, _ = _read_curve(cfg["curve"])
    try:
        emap, _ = _evolved_grid(cfg, curve)
    except ValueError as exc:
        return _fail(EXIT_EVOLUTION, _with_hint(exc))
    l0 = emap.sections[emap.v0_index]
    try:
        c_hat = channel_partner_chart(
            l0, cfg["center_x"], cfg["center_y"], cfg["radius"]
        )
        pair = ribaucour_evolve(emap, curve, c_hat=c_hat)
    except ValueError as exc:
        return _fail(EXIT_TRANSFORM, exc)
    report = verify_ribaucour(
        pair, incidence_tol=cfg["incidence_tol"], margin_tol=cfg["margin_tol"]
    )
    lio.write_surface(cfg["out_surface"], pair.f)
    lio.write_surface(cfg["out_partner"], pair.f_hat)
    verification = dataclasses.asdict(report)
    if cfg["out_pair"] is not None:
        lio.write_pair(
            cfg["out_pair"], pair.s0, cfg["out_surface"], cfg["out_partner"],
            verification,
        )
    if cfg["out_report"] is not None:
        lio.write_report(cfg["out_report"], report.to_text(), verification)
    sys.stdout.write(report.to_text())
    print(f"wrote pair surfaces {cfg['out_surface']} {cfg['out_partner']}")
    return EXIT_OK


def _cmd_export(cfg: dict) -> int:
    _positive(cfg, "tol")
    grid = _read_surface(cfg["surface"])
    try:
        counts = lio.export_mesh(
            cfg["out"], grid, euclidean_frame(), fmt=cfg["format"], tol=cfg["tol"]
        )
    except ValueError as exc:
        return _fail(EXIT_CONFIG, exc)
    print(
        f"wrote mesh {cfg['out']} ({counts['vertices']} vertices, "
        f"{counts['faces']} faces, {counts['unprojectable']} unprojectable)"
    )
    return EXIT_OK


_COMMANDS = {
    "elastica": _cmd_elastica,
    "evolve": _cmd_evolve,
    "analyze": _cmd_analyze,
    "ribaucour": _cmd_ribaucour,
    "export": _cmd_export,
}


# ---------------------------------------------------------------------------
# parser

def _add_options(sub: argparse.ArgumentParser, command: str) -> None:
    sub.add_argument("--config", default=None, metavar="FILE",
                     help="flat JSON file of option values")
    for key, (kind, default) in _SPECS[command].items():
        flag = "--" + key.replace("_", "-")
        if kind == "bool":
            sub.add_argument(flag, action="store_true", default=None)
        elif kind == "float":
            sub.add_argument(flag, type=float, default=None, metavar="X",
                             help=f"default {default}")
        elif kind == "int":
            sub.add_argument(flag, type=int, default=None, metavar="N",
                             help=f"default {default}")
        else:
            extra = {"choices": _CHOICES[key]} if key in _CHOICES else {}
            sub.add_argument(flag, default=None, metavar="S" if extra else "PATH",
                             **extra)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="liesurf",
                     description="curvature-line surface pipeline")
    subs = parser.add_subparsers(dest="command", required=True,
                                 parser_class=_Parser)
    helps = {
        "elastica": "integrate a curvature profile and write its contact lift",
        "evolve": "sweep a curve through a family of complexes into a surface",
        "analyze": "classify a surface grid and write a diagnostic report",
        "ribaucour": "construct and verify a channel-complex transform pair",
        "export": "project a surface grid to an OBJ or PLY mesh",
    }
    for command in _SPECS:
        _add_options(subs.add_parser(command, help=helps[command]), command)
    return parser


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = _resolve(ns)
        return _COMMANDS[ns.command](cfg)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc)


if __name__ == "__main__":
    raise SystemExit(main())
