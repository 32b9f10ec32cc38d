"""Command-line front end.

    sectorpatch modes   --config run.json [--out DIR]
    sectorpatch field   --config run.json
    sectorpatch pattern --config run.json [--grid DEG]
    sectorpatch synth   --config run.json [--preset NAME] [--grid DEG]
    sectorpatch metrics --config run.json [--pattern FILE.csv]
    sectorpatch sweep   --config run.json [--param r_e --start 10 --stop 20 --num 11]

Exit status: 0 success, 2 configuration/input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
import traceback
from pathlib import Path

import numpy as np

from . import cavity, metrics, radiator, synthesis
from .config import RunConfig, load_config, parse_config
from .errors import ConfigError, PatternFileError, SectorPatchError
from .pattern import PatternGrid, dumps_pattern, load_pattern

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _f(x) -> str:
    return format(float(x), ".16e")


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="ascii", newline="\n")
    return path


def _csv_text(header, rows, meta) -> str:
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}={v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def solve(cfg: RunConfig) -> list[cavity.Mode]:
    n_max, m_max = cfg.truncation
    return cavity.solve_modes(cfg.geometry, n_max, m_max, *cfg.scan)


def analysis_frequency(cfg: RunConfig, modes=None) -> float:
    """Configured frequency, or the resonance of the ``auto_mode`` mode."""
    if cfg.frequency is not None:
        return cfg.frequency
    modes = modes if modes is not None else solve(cfg)
    m, n = cfg.auto_mode
    return cavity.find_mode(modes, m, n).f_res


def build_field(cfg: RunConfig, f: float) -> cavity.DrivenField:
    cfg.geometry.check_thin(f)
    return cavity.driven_field(cfg.geometry, cfg.feed, f, cfg.truncation, cfg.q_factor,
                               x_max=cfg.scan[0], step=cfg.scan[1])


def port_patterns(cfg: RunConfig) -> list[PatternGrid]:
    """Embedded patterns of P1..P4 (P1 computed, the others rotated)."""
    f = analysis_frequency(cfg)
    field = build_field(cfg, f)
    quad = radiator.AperturePerimeter(cfg.geometry, *cfg.quadrature)
    p1 = radiator.embedded_pattern(cfg.geometry, field, f, cfg.grid, quad)
    return synthesis.port_patterns(p1, cfg.ports)


def synthesize(cfg: RunConfig):
    if cfg.excitation is None:
        raise ConfigError("synth needs an 'excitation' (config) or --preset")
    total = synthesis.superpose(port_patterns(cfg), cfg.excitation)
    return total, report_for(cfg, total)


def report_for(cfg: RunConfig, p: PatternGrid) -> metrics.MetricsReport:
    return metrics.evaluate(p, cfg.efficiency, cfg.enclosing_radius, cfg.phi_cuts,
                            cfg.theta_cut, cfg.ar_directions)


def _meta(cfg: RunConfig, **extra) -> dict:
    return {"config_sha256": cfg.digest, **extra}


def cmd_modes(cfg: RunConfig) -> list[Path]:
    modes = solve(cfg)
    header = ("n", "m", "v", "x_mv", "f_res_hz")
    rows = [(md.n, md.m, _f(md.v), _f(md.x_mv), _f(md.f_res)) for md in modes]
    out = cfg.output_dir
    doc = {"config_sha256": cfg.digest,
           "modes": [{"n": md.n, "m": md.m, "v": md.v, "x_mv": md.x_mv, "f_res_hz": md.f_res}
                     for md in modes]}
    return [_write(out / "modes.csv", _csv_text(header, rows, _meta(cfg))),
            _write(out / "modes.json", json.dumps(doc, indent=2) + "\n")]


def cmd_field(cfg: RunConfig) -> list[Path]:
    f = analysis_frequency(cfg)
    field = build_field(cfg, f)
    g = cfg.geometry
    n_rho, n_phi = cfg.field_grid
    rho = np.linspace(g.r_i, g.r_e, n_rho)
    phi = np.linspace(0.0, g.alpha, n_phi)
    R, P = np.meshgrid(rho, phi, indexing="ij")
    ez = field(R, P)
    rows = [(_f(R[i, j]), _f(math.degrees(P[i, j])), _f(ez[i, j].real), _f(ez[i, j].imag))
            for i in range(n_rho) for j in range(n_phi)]
    meta = _meta(cfg, frequency_hz=_f(f), coordinates="sector-local")
    return [_write(cfg.output_dir / "field.csv",
                   _csv_text(("rho_m", "phi_deg", "re_Ez", "im_Ez"), rows, meta))]


def cmd_pattern(cfg: RunConfig) -> list[Path]:
    paths = []
    for k, p in enumerate(port_patterns(cfg), start=1):
        paths.append(_write(cfg.output_dir / f"pattern_P{k}.csv",
                            dumps_pattern(p, _meta(cfg, port=f"P{k}"))))
    return paths


def cmd_synth(cfg: RunConfig) -> list[Path]:
    total, report = synthesize(cfg)
    out = cfg.output_dir
    return [_write(out / "synth_pattern.csv", dumps_pattern(total, _meta(cfg))),
            _write(out / "metrics.json", report.to_json())]


def cmd_metrics(cfg: RunConfig, pattern_path=None) -> list[Path]:
    if pattern_path is not None:
        report = report_for(cfg, load_pattern(pattern_path))
    else:
        _, report = synthesize(cfg)
    return [_write(cfg.output_dir / "metrics.json", report.to_json())]


SWEEP_HEADER = ("index", "parameter", "value", "n", "m", "v", "x_mv", "f_res_hz",
                "frequency_hz", "ka", "harrington_gmax_dBi", "error")


def sweep_rows(cfg: RunConfig, parameter=None, start=None, stop=None, num=None):
    """One row per sweep point; failures are reported in the ``error`` column."""
    sw = dict(cfg.sweep or {})
    for key, val in (("parameter", parameter), ("start", start), ("stop", stop), ("num", num)):
        if val is not None:
            sw[key] = val
    missing = {"parameter", "start", "stop", "num"} - set(sw)
    if missing:
        raise ConfigError(f"sweep needs {sorted(missing)} (config 'sweep' or flags)")
    param = sw["parameter"]
    if param not in ("r_i", "r_e", "alpha", "eps_r", "frequency"):
        raise ConfigError(f"unknown sweep parameter {param!r}")
    num = int(sw["num"])
    if num < 0:
        raise ConfigError("'sweep.num' must be >= 0")
    hold_ratio = bool(sw.get("hold_ratio", param == "r_e"))
    values = np.linspace(float(sw["start"]), float(sw["stop"]), num) if num else []

    base = copy.deepcopy(cfg.raw)
    base["sweep"] = None
    rows = []
    for idx, value in enumerate(values):
        value = float(value)
        doc = copy.deepcopy(base)
        if param == "frequency":
            doc["frequency"], doc["auto_mode"] = value, None
        else:
            if param == "r_e" and hold_ratio:
                doc["geometry"]["r_i"] = base["geometry"]["r_i"] * value / base["geometry"]["r_e"]
            doc["geometry"][param] = value
        try:
            point = parse_config(doc)
            modes = solve(point)
            if point.auto_mode is not None:
                md = cavity.find_mode(modes, *point.auto_mode)
            else:
                md = modes[0]
            f = point.frequency if point.frequency is not None else md.f_res
            ka = metrics.electrical_size(f, point.enclosing_radius)
            rows.append((idx, param, _f(value), md.n, md.m, _f(md.v), _f(md.x_mv), _f(md.f_res),
                         _f(f), _f(ka), _f(metrics.harrington_gmax(ka)), ""))
        except SectorPatchError as exc:
            rows.append((idx, param, _f(value), "", "", "", "", "", "", "", "",
                         f"{type(exc).__name__}: {exc}"))
    return rows


def cmd_sweep(cfg: RunConfig, parameter=None, start=None, stop=None, num=None) -> list[Path]:
    rows = sweep_rows(cfg, parameter, start, stop, num)
    return [_write(cfg.output_dir / "sweep.csv", _csv_text(SWEEP_HEADER, rows, _meta(cfg)))]


def _provenance(exc: BaseException) -> str:
    mod = "cli"
    for frame, _ in traceback.walk_tb(exc.__traceback__):
        name = frame.f_globals.get("__name__", "")
        if name.startswith("sectorpatch."):
            mod = name.split(".", 1)[1]
    return mod


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sectorpatch", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("modes", "cavity mode table"), ("field", "interior E_z map"),
                        ("pattern", "per-port embedded patterns"),
                        ("synth", "superposed pattern and metrics"),
                        ("metrics", "metrics of a synthesized or loaded pattern"),
                        ("sweep", "parameter sweep of the tracked mode")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--preset", choices=synthesis.PRESET_NAMES, help="excitation preset")
        p.add_argument("--grid", type=float, help="theta and phi grid step in degrees")
        p.add_argument("--quiet", action="store_true", help="do not list written files")
        if name == "metrics":
            p.add_argument("--pattern", help="pattern CSV to evaluate instead of synthesizing")
        if name == "sweep":
            p.add_argument("--param", help="r_i, r_e, alpha, eps_r or frequency")
            p.add_argument("--start", type=float)
            p.add_argument("--stop", type=float)
            p.add_argument("--num", type=int)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.out:
        overrides["output_dir"] = args.out
    if args.preset:
        overrides["excitation"] = args.preset
    if args.grid:
        overrides["grid"] = {"theta_step": args.grid, "phi_step": args.grid}
    try:
        cfg = load_config(args.config, overrides)
        if args.command == "modes":
            paths = cmd_modes(cfg)
        elif args.command == "field":
            paths = cmd_field(cfg)
        elif args.command == "pattern":
            paths = cmd_pattern(cfg)
        elif args.command == "synth":
            paths = cmd_synth(cfg)
        elif args.command == "metrics":
            paths = cmd_metrics(cfg, args.pattern)
        else:
            paths = cmd_sweep(cfg, args.param, args.start, args.stop, args.num)
    except (ConfigError, PatternFileError) as exc:
        print(f"sectorpatch: error [{_provenance(exc)}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SectorPatchError as exc:
        print(f"sectorpatch: error [{_provenance(exc)}]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if not args.quiet:
        for p in paths:
            print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
