"""Far-field pattern container, exact quarter-turn rotation and CSV I/O."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import GridError, PatternFileError

CSV_HEADER = ("theta_deg", "phi_deg", "re_Etheta", "im_Etheta", "re_Ephi", "im_Ephi")
NORMALIZATIONS = ("field-unnormalized", "peak-normalized")

_ANGLE_TOL = 1e-9


def _count(span, step, inclusive):
    q = span / step
    n = round(q)
    if inclusive:
        if abs(q - n) > _ANGLE_TOL * max(1.0, q):
            raise GridError(f"step {step} deg does not divide {span} deg")
        return n + 1
    return math.ceil(q - _ANGLE_TOL)


def grid_shape(theta_step: float, phi_step: float) -> tuple[int, int]:
    """Node counts ``(n_theta, n_phi)`` for theta in [0, 180] and phi in [0, 360)."""
    if not (theta_step > 0 and phi_step > 0):
        raise GridError("grid steps must be positive")
    return _count(180.0, theta_step, True), _count(360.0, phi_step, False)


@dataclass(frozen=True)
class PatternGrid:
    """Complex ``(E_theta, E_phi)`` samples on a regular spherical grid.

    ``e_theta[i, j]`` is the sample at ``theta = i * theta_step`` and
    ``phi = j * phi_step`` (degrees).  Arrays are copied and made read-only.
    """

    theta_step: float
    phi_step: float
    e_theta: np.ndarray
    e_phi: np.ndarray
    frequency: float
    normalization: str = "field-unnormalized"
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        shape = grid_shape(self.theta_step, self.phi_step)
        for name in ("e_theta", "e_phi"):
            arr = np.array(getattr(self, name), dtype=complex)
            if arr.shape != shape:
                raise GridError(f"{name} has shape {arr.shape}, grid needs {shape}")
            if not np.all(np.isfinite(arr)):
                raise GridError(f"{name} contains non-finite samples")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.normalization not in NORMALIZATIONS:
            raise GridError(f"unknown normalization {self.normalization!r}")
        if not self.frequency > 0:
            raise GridError("frequency must be positive")
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def shape(self):
        return self.e_theta.shape

    @property
    def theta_deg(self) -> np.ndarray:
        return np.arange(self.shape[0]) * self.theta_step

    @property
    def phi_deg(self) -> np.ndarray:
        return np.arange(self.shape[1]) * self.phi_step

    @property
    def intensity(self) -> np.ndarray:
        """Radiation intensity ``|E_theta|^2 + |E_phi|^2`` (arbitrary units)."""
        return np.abs(self.e_theta) ** 2 + np.abs(self.e_phi) ** 2

    @property
    def covers_sphere(self) -> bool:
        return abs(self.shape[1] * self.phi_step - 360.0) < _ANGLE_TOL

    def index(self, theta: float, phi: float) -> tuple[int, int]:
        """Grid indices of the node at ``(theta, phi)`` degrees; raises if off-grid."""
        i = theta / self.theta_step
        j = (phi % 360.0) / self.phi_step
        if abs(i - round(i)) > _ANGLE_TOL or abs(j - round(j)) > _ANGLE_TOL:
            raise GridError(f"direction ({theta}, {phi}) deg is not a grid node")
        i, j = int(round(i)), int(round(j)) % self.shape[1]
        if not 0 <= i < self.shape[0]:
            raise GridError(f"theta {theta} deg outside [0, 180]")
        return i, j

    def sample(self, theta: float, phi: float) -> tuple[complex, complex]:
        i, j = self.index(theta, phi)
        return complex(self.e_theta[i, j]), complex(self.e_phi[i, j])

    def same_grid(self, other: "PatternGrid") -> bool:
        return (self.shape == other.shape
                and abs(self.theta_step - other.theta_step) < _ANGLE_TOL
                and abs(self.phi_step - other.phi_step) < _ANGLE_TOL)

    def replace(self, e_theta=None, e_phi=None, **changes) -> "PatternGrid":
        return PatternGrid(
            theta_step=changes.pop("theta_step", self.theta_step),
            phi_step=changes.pop("phi_step", self.phi_step),
            e_theta=self.e_theta if e_theta is None else e_theta,
            e_phi=self.e_phi if e_phi is None else e_phi,
            frequency=changes.pop("frequency", self.frequency),
            normalization=changes.pop("normalization", self.normalization),
            metadata=changes.pop("metadata", self.metadata),
        )

    def peak_normalized(self) -> "PatternGrid":
        """Copy scaled so that the maximum of ``|E|`` is one."""
        peak = math.sqrt(float(self.intensity.max()))
        if peak == 0:
            raise GridError("cannot normalize an all-zero pattern")
        return self.replace(self.e_theta / peak, self.e_phi / peak,
                            normalization="peak-normalized")


def rotate_pattern(p: PatternGrid, quarter_turns: int) -> PatternGrid:
    """Rotate a pattern by ``90 * quarter_turns`` degrees about the z-axis.

    The output at ``(theta, phi)`` is the input at ``(theta, phi - 90 q)``.
    Spherical components are invariant under z-rotations, so this is a pure
    re-indexing with no interpolation.
    """
    q = 90.0 / p.phi_step
    if abs(q - round(q)) > _ANGLE_TOL or not p.covers_sphere:
        raise GridError(f"phi_step {p.phi_step} deg does not divide 90 deg; "
                        "quarter-turn rotation needs an exact re-indexing")
    shift = int(round(q)) * int(quarter_turns)
    return p.replace(np.roll(p.e_theta, shift, axis=1), np.roll(p.e_phi, shift, axis=1))


def _fmt(x: float) -> str:
    return format(float(x), ".16e")


def dumps_pattern(p: PatternGrid, extra: dict | None = None) -> str:
    """Serialize to the pattern CSV text (see :func:`save_pattern`)."""
    buf = io.StringIO()
    meta = {"frequency_hz": _fmt(p.frequency), "normalization": p.normalization,
            "theta_step_deg": _fmt(p.theta_step), "phi_step_deg": _fmt(p.phi_step)}
    for k, v in {**p.metadata, **(extra or {})}.items():
        meta.setdefault(str(k), str(v))
    for k, v in meta.items():
        if "\n" in k or "\n" in v or "=" in k:
            raise PatternFileError(f"metadata entry {k!r} cannot be serialized")
        buf.write(f"# {k}={v}\n")
    buf.write(",".join(CSV_HEADER) + "\n")
    th, ph = p.theta_deg, p.phi_deg
    et, ep = p.e_theta, p.e_phi
    for i in range(p.shape[0]):
        t = _fmt(th[i])
        for j in range(p.shape[1]):
            a, b = et[i, j], ep[i, j]
            buf.write(f"{t},{_fmt(ph[j])},{_fmt(a.real)},{_fmt(a.imag)},"
                      f"{_fmt(b.real)},{_fmt(b.imag)}\n")
    return buf.getvalue()


def save_pattern(p: PatternGrid, path, extra: dict | None = None) -> None:
    """Write ``p`` as CSV.

    Layout: a ``# key=value`` comment block (``frequency_hz``,
    ``normalization``, grid steps, any metadata), then the header
    ``theta_deg,phi_deg,re_Etheta,im_Etheta,re_Ephi,im_Ephi`` and one row per
    node sorted by theta then phi.  Numbers use 17 significant digits so the
    file round-trips exactly.
    """
    Path(path).write_text(dumps_pattern(p, extra), encoding="ascii", newline="\n")


def loads_pattern(text: str, source: str = "<string>") -> PatternGrid:
    lines = text.splitlines()
    meta = {}
    pos = 0
    while pos < len(lines) and lines[pos].startswith("#"):
        body = lines[pos][1:].strip()
        if body:
            if "=" not in body:
                raise PatternFileError(f"{source}:{pos + 1}: comment is not key=value: {body!r}")
            k, v = body.split("=", 1)
            meta[k.strip()] = v.strip()
        pos += 1
    if pos >= len(lines):
        raise PatternFileError(f"{source}: missing CSV header")
    header = tuple(h.strip() for h in lines[pos].split(","))
    if header != CSV_HEADER:
        missing = [c for c in CSV_HEADER if c not in header]
        raise PatternFileError(f"{source}:{pos + 1}: bad header {header}; "
                               f"missing columns {missing}" if missing else
                               f"{source}:{pos + 1}: columns must be {CSV_HEADER}")
    for key in ("frequency_hz", "normalization"):
        if key not in meta:
            raise PatternFileError(f"{source}: metadata block lacks {key!r}")

    rows = []
    for lineno, rec in enumerate(csv.reader(lines[pos + 1:]), start=pos + 2):
        if not rec:
            continue
        if len(rec) != 6:
            raise PatternFileError(f"{source}:{lineno}: expected 6 fields, got {len(rec)}")
        try:
            vals = [float(x) for x in rec]
        except ValueError as exc:
            raise PatternFileError(f"{source}:{lineno}: {exc}") from None
        if not all(math.isfinite(x) for x in vals):
            raise PatternFileError(f"{source}:{lineno}: non-finite value")
        rows.append((lineno, vals))
    if not rows:
        raise PatternFileError(f"{source}: no data rows")

    data = np.array([r[1] for r in rows])
    thetas = np.unique(data[:, 0])
    phis = np.unique(data[:, 1])
    theta_step = float(meta["theta_step_deg"]) if "theta_step_deg" in meta else (
        float(np.min(np.diff(thetas))) if len(thetas) > 1 else 0.0)
    phi_step = float(meta["phi_step_deg"]) if "phi_step_deg" in meta else (
        float(np.min(np.diff(phis))) if len(phis) > 1 else 360.0)
    try:
        nt, nphi = grid_shape(theta_step, phi_step)
    except GridError as exc:
        raise PatternFileError(f"{source}: irregular grid: {exc}") from None

    et = np.full((nt, nphi), np.nan, dtype=complex)
    ep = np.full((nt, nphi), np.nan, dtype=complex)
    prev = None
    for (lineno, vals) in rows:
        t, ph = vals[0], vals[1]
        i, j = t / theta_step, ph / phi_step
        ii, jj = int(round(i)), int(round(j))
        if (abs(i - ii) > _ANGLE_TOL * max(1, abs(i)) or abs(j - jj) > _ANGLE_TOL * max(1, abs(j))
                or not 0 <= ii < nt or not 0 <= jj < nphi):
            raise PatternFileError(f"{source}:{lineno}: ({t}, {ph}) deg is off the regular "
                                   f"{theta_step} x {phi_step} deg grid")
        if prev is not None and (ii, jj) <= prev:
            raise PatternFileError(f"{source}:{lineno}: rows must be sorted by theta then phi "
                                   "without duplicates")
        prev = (ii, jj)
        et[ii, jj] = complex(vals[2], vals[3])
        ep[ii, jj] = complex(vals[4], vals[5])
    gaps = np.argwhere(np.isnan(et.real))
    if len(gaps):
        i, j = gaps[0]
        raise PatternFileError(
            f"{source}: missing grid node theta={i * theta_step:g} deg, phi={j * phi_step:g} deg "
            f"({len(gaps)} node(s) missing)")

    extra = {k: v for k, v in meta.items()
             if k not in ("frequency_hz", "normalization", "theta_step_deg", "phi_step_deg")}
    try:
        return PatternGrid(theta_step, phi_step, et, ep, float(meta["frequency_hz"]),
                           meta["normalization"], extra)
    except (GridError, ValueError) as exc:
        raise PatternFileError(f"{source}: {exc}") from None


def load_pattern(path) -> PatternGrid:
    """Read a pattern CSV written by :func:`save_pattern` (or any conforming tool)."""
    path = Path(path)
    return loads_pattern(path.read_text(encoding="ascii"), source=str(path))
