"""JSON run configuration.

Lengths are millimetres and angles degrees in the file; :class:`RunConfig`
holds SI units and radians.  Unknown keys are rejected so that a typo in a
physical parameter never silently falls back to a default.

Example::

    {
      "geometry": {"r_i": 1.5, "r_e": 14.0, "alpha": 90.0, "phi_0": 135.0,
                   "t": 1.27, "eps_r": 6.3, "tan_delta": 0.0023},
      "auto_mode": {"m": 1, "n": 1},
      "excitation": "RHCP"
    }
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .cavity import FeedPoint, SectorGeometry
from .errors import ConfigError, DomainError
from .synthesis import PRESET_NAMES, ExcitationSet, preset

# Probe of the first port: (-6.5 mm, 2.3 mm) in board coordinates, i.e. the
# sector bisected at 135 degrees, expressed in its local polar frame.
_FEED_X, _FEED_Y = -6.5, 2.3
DEFAULT_FEED_RHO_MM = math.hypot(_FEED_X, _FEED_Y)
DEFAULT_FEED_PHI_DEG = math.degrees(math.atan2(_FEED_Y, _FEED_X)) - (135.0 - 45.0)

DEFAULTS = {
    "geometry": {"r_i": 1.5, "r_e": 14.0, "alpha": 90.0, "phi_0": 135.0, "t": 1.27,
                 "eps_r": 6.3, "tan_delta": 0.0023, "radius_extension": 0.0},
    "frequency": None,
    "auto_mode": None,
    "truncation": {"n_max": 4, "m_max": 3},
    "q_factor": 200.0,
    "feed": {"rho": DEFAULT_FEED_RHO_MM, "phi": DEFAULT_FEED_PHI_DEG},
    "grid": {"theta_step": 1.0, "phi_step": 1.0},
    "quadrature": {"arc_nodes": 64, "edge_nodes": 32},
    "scan": {"x_max": 40.0, "step": 1e-3},
    "excitation": None,
    "ports": 4,
    "efficiency": 1.0,
    "enclosing_radius": None,
    "metrics": {"phi_cuts": [0.0, 90.0], "theta_cut": 90.0, "ar_directions": [[0.0, 0.0]]},
    "field_grid": {"n_rho": 50, "n_phi": 50},
    "sweep": None,
    "output_dir": "out",
}

_SWEEP_KEYS = {"parameter", "start", "stop", "num", "hold_ratio"}
SWEEP_PARAMETERS = ("r_i", "r_e", "alpha", "eps_r", "frequency")


def _merge(base, override, path):
    out = copy.deepcopy(base)
    for key, val in override.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[key], dict) and key != "sweep":
            if not isinstance(val, dict):
                raise ConfigError(f"{where!r} must be an object")
            out[key] = _merge(base[key], val, where + ".")
        else:
            out[key] = val
    return out


def _num(d, key, path, *, positive=False, integer=False, allow_zero=True):
    val = d[key]
    name = f"{path}{key}"
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{name!r} must be a number, got {val!r}")
    if not math.isfinite(val):
        raise ConfigError(f"{name!r} must be finite")
    if integer and int(val) != val:
        raise ConfigError(f"{name!r} must be an integer")
    if positive and (val < 0 or (val == 0 and not allow_zero)):
        raise ConfigError(f"{name!r} must be positive, got {val!r}")
    return int(val) if integer else float(val)


@dataclass(frozen=True)
class RunConfig:
    geometry: SectorGeometry
    feed: FeedPoint
    frequency: float | None
    auto_mode: tuple[int, int] | None
    truncation: tuple[int, int]
    q_factor: float
    grid: tuple[float, float]
    quadrature: tuple[int, int]
    scan: tuple[float, float]
    excitation: ExcitationSet | None
    ports: int
    efficiency: float
    enclosing_radius: float
    phi_cuts: tuple
    theta_cut: float | None
    ar_directions: tuple
    field_grid: tuple[int, int]
    sweep: dict | None
    output_dir: Path
    raw: dict = field(compare=False, repr=False)

    @property
    def digest(self) -> str:
        """SHA-256 of the resolved configuration (output directory excluded)."""
        doc = {k: v for k, v in self.raw.items() if k != "output_dir"}
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def parse_excitation(entry, ports):
    if entry is None:
        return None
    if isinstance(entry, str):
        entry = {"preset": entry}
    if not isinstance(entry, dict) or set(entry) - {"preset", "coefficients"} or len(entry) != 1:
        raise ConfigError("'excitation' must be a preset name, {'preset': name} or "
                          "{'coefficients': [[amplitude, phase_deg] or null, ...]}")
    if "preset" in entry:
        name = entry["preset"]
        if name not in PRESET_NAMES:
            raise ConfigError(f"unknown preset {name!r} in 'excitation'; "
                              f"choose from {', '.join(PRESET_NAMES)}")
        exc = preset(name)
    else:
        rows = entry["coefficients"]
        if not isinstance(rows, list):
            raise ConfigError("'excitation.coefficients' must be a list")
        pairs = []
        for k, row in enumerate(rows):
            if row is None:
                pairs.append(None)
                continue
            if (not isinstance(row, list) or len(row) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in row)):
                raise ConfigError(f"'excitation.coefficients[{k}]' must be [amplitude, phase_deg]")
            if row[0] < 0:
                raise ConfigError(f"'excitation.coefficients[{k}]' amplitude must be >= 0")
            pairs.append((float(row[0]), float(row[1]) % 360.0))
        exc = ExcitationSet.from_polar(pairs)
    if exc.ports != ports:
        raise ConfigError(f"'excitation' has {exc.ports} coefficients but the antenna has {ports} ports")
    return exc


def parse_config(doc: dict, overrides: dict | None = None) -> RunConfig:
    """Validate a config mapping and resolve defaults."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    raw = _merge(DEFAULTS, doc, "")
    if overrides:
        raw = _merge(raw, overrides, "")

    g = raw["geometry"]
    for key in ("r_i", "r_e", "alpha", "t", "eps_r"):
        _num(g, key, "geometry.", positive=True, allow_zero=False)
    for key in ("phi_0", "tan_delta", "radius_extension"):
        _num(g, key, "geometry.", positive=key != "phi_0")
    ext = g["radius_extension"] * 1e-3
    try:
        geom = SectorGeometry(r_i=g["r_i"] * 1e-3, r_e=g["r_e"] * 1e-3 + ext,
                              alpha=math.radians(g["alpha"]), phi_0=math.radians(g["phi_0"]),
                              t=g["t"] * 1e-3, eps_r=float(g["eps_r"]),
                              tan_delta=float(g["tan_delta"]))
    except DomainError as exc:
        raise ConfigError(f"geometry: {exc}") from None

    if (raw["frequency"] is None) == (raw["auto_mode"] is None):
        raise ConfigError("exactly one of 'frequency' (Hz) or 'auto_mode' {'m', 'n'} is required")
    frequency = auto = None
    if raw["frequency"] is not None:
        frequency = _num(raw, "frequency", "", positive=True, allow_zero=False)
    else:
        am = raw["auto_mode"]
        if not isinstance(am, dict) or set(am) != {"m", "n"}:
            raise ConfigError("'auto_mode' must be an object with keys 'm' and 'n'")
        auto = (_num(am, "m", "auto_mode.", integer=True), _num(am, "n", "auto_mode.", integer=True))
        if auto[0] < 1 or auto[1] < 0:
            raise ConfigError("'auto_mode' needs m >= 1 and n >= 0")

    tr = raw["truncation"]
    trunc = (_num(tr, "n_max", "truncation.", integer=True, positive=True),
             _num(tr, "m_max", "truncation.", integer=True, positive=True, allow_zero=False))
    if auto and (auto[1] > trunc[0] or auto[0] > trunc[1]):
        raise ConfigError("'auto_mode' lies outside the 'truncation' box")

    fd = raw["feed"]
    feed = FeedPoint(_num(fd, "rho", "feed.", positive=True) * 1e-3,
                     math.radians(_num(fd, "phi", "feed.")))
    try:
        feed.validate(geom)
    except DomainError as exc:
        raise ConfigError(f"feed: {exc}") from None

    gr = raw["grid"]
    grid = (_num(gr, "theta_step", "grid.", positive=True, allow_zero=False),
            _num(gr, "phi_step", "grid.", positive=True, allow_zero=False))
    for name, step, span in (("theta_step", grid[0], 180.0), ("phi_step", grid[1], 90.0)):
        q = span / step
        if abs(q - round(q)) > 1e-9:
            raise ConfigError(f"'grid.{name}' must divide {span:g} degrees")
    qd = raw["quadrature"]
    quad = (_num(qd, "arc_nodes", "quadrature.", integer=True, positive=True),
            _num(qd, "edge_nodes", "quadrature.", integer=True, positive=True))
    if min(quad) < 8:
        raise ConfigError("'quadrature' node counts must be >= 8")
    sc = raw["scan"]
    scan = (_num(sc, "x_max", "scan.", positive=True, allow_zero=False),
            _num(sc, "step", "scan.", positive=True, allow_zero=False))

    q_factor = _num(raw, "q_factor", "", positive=True, allow_zero=False)
    ports = _num(raw, "ports", "", integer=True, positive=True)
    if ports != 4:
        raise ConfigError("'ports' must be 4 (four rotated sectors)")
    exc = parse_excitation(raw["excitation"], ports)
    eff = _num(raw, "efficiency", "", positive=True, allow_zero=False)
    if eff > 1:
        raise ConfigError("'efficiency' must lie in (0, 1]")
    a = raw["enclosing_radius"]
    if a is None:
        enclosing = geom.r_e
    else:
        enclosing = _num(raw, "enclosing_radius", "", positive=True, allow_zero=False) * 1e-3

    mt = raw["metrics"]
    try:
        phi_cuts = tuple(float(c) for c in mt["phi_cuts"])
        theta_cut = None if mt["theta_cut"] is None else float(mt["theta_cut"])
        ar_dirs = tuple((float(t), float(p)) for t, p in mt["ar_directions"])
    except (TypeError, ValueError):
        raise ConfigError("'metrics' entries are malformed") from None
    fg = raw["field_grid"]
    fgrid = (_num(fg, "n_rho", "field_grid.", integer=True, positive=True, allow_zero=False),
             _num(fg, "n_phi", "field_grid.", integer=True, positive=True, allow_zero=False))

    sweep = raw["sweep"]
    if sweep is not None:
        if not isinstance(sweep, dict):
            raise ConfigError("'sweep' must be an object")
        unknown = set(sweep) - _SWEEP_KEYS
        if unknown:
            raise ConfigError(f"unknown config key 'sweep.{sorted(unknown)[0]}'")
        missing = {"parameter", "start", "stop", "num"} - set(sweep)
        if missing:
            raise ConfigError(f"'sweep' lacks {sorted(missing)}")
        if sweep["parameter"] not in SWEEP_PARAMETERS:
            raise ConfigError(f"unknown sweep parameter {sweep['parameter']!r}; "
                              f"choose from {', '.join(SWEEP_PARAMETERS)}")
        _num(sweep, "start", "sweep.")
        _num(sweep, "stop", "sweep.")
        _num(sweep, "num", "sweep.", integer=True, positive=True)

    return RunConfig(geom, feed, frequency, auto, trunc, q_factor, grid, quad,
                     scan, exc, ports, eff, enclosing, phi_cuts, theta_cut, ar_dirs, fgrid,
                     sweep, Path(raw["output_dir"]), raw)


def load_config(path, overrides: dict | None = None) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return parse_config(doc, overrides)
