"""Pattern and antenna figures of merit.

Angles are in degrees throughout.  Intensities ``U = |E_theta|^2 + |E_phi|^2``
come from :class:`~sectorpatch.pattern.PatternGrid` samples; absolute scale
never matters because every metric here is a ratio.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import constants

from .errors import DomainError, GridError
from .pattern import PatternGrid

# P - |S| below this fraction of P is reported as pure linear polarization.
_LINEAR_TOL = 1e-15
# Intensities within this fraction of the maximum count as ties in beam_peak.
_TIE_TOL = 1e-12


def radiated_power(p: PatternGrid) -> float:
    """``integral U sin(theta) dtheta dphi`` by the trapezoid rule (periodic in phi)."""
    if not p.covers_sphere:
        raise GridError("directivity needs phi samples covering [0, 360)")
    theta = np.radians(p.theta_deg)
    ring = p.intensity.sum(axis=1) * math.radians(p.phi_step)
    return float(np.trapezoid(ring * np.sin(theta), theta))


def directivity(p: PatternGrid, direction=None) -> float:
    """Directivity in dBi at ``direction = (theta, phi)``; peak direction if omitted."""
    prad = radiated_power(p)
    if prad <= 0:
        raise GridError("pattern radiates no power")
    if direction is None:
        u = float(p.intensity.max())
    else:
        i, j = p.index(*direction)
        u = float(p.intensity[i, j])
    with np.errstate(divide="ignore"):
        return float(10 * np.log10(4 * np.pi * u / prad))


def axial_ratio(e_theta, e_phi):
    """Polarization-ellipse axial ratio in dB; ``inf`` for linear polarization.

    ``AR = sqrt((P + |S|) / (P - |S|))`` with ``P = |Et|^2 + |Ep|^2`` and
    ``S = Et^2 + Ep^2``.  Broadcasts over arrays.
    """
    et = np.asarray(e_theta, dtype=complex)
    ep = np.asarray(e_phi, dtype=complex)
    P = np.abs(et) ** 2 + np.abs(ep) ** 2
    if np.any(P == 0):
        raise DomainError("axial ratio of a zero field is undefined")
    S = np.abs(et * et + ep * ep)
    den = P - S
    linear = den < _LINEAR_TOL * P
    with np.errstate(divide="ignore", invalid="ignore"):
        ar = np.where(linear, np.inf, 10 * np.log10((P + S) / np.where(linear, 1.0, den)))
    return ar.item() if ar.ndim == 0 else ar


def circular_components(e_theta, e_phi):
    """Right- and left-hand circular amplitudes ``(E_R, E_L)``.

    Outward propagation along ``r = theta x phi`` with ``exp(+j w t)`` time
    dependence: RHCP is ``(theta - j phi) / sqrt(2)``.
    """
    et = np.asarray(e_theta, dtype=complex)
    ep = np.asarray(e_phi, dtype=complex)
    return (et + 1j * ep) / math.sqrt(2), (et - 1j * ep) / math.sqrt(2)


def polarization_sense(e_theta, e_phi) -> str:
    """``"RHCP"``, ``"LHCP"`` or ``"linear"`` from the dominant circular component."""
    if np.isinf(axial_ratio(e_theta, e_phi)):
        return "linear"
    er, el = circular_components(e_theta, e_phi)
    return "RHCP" if abs(er) > abs(el) else "LHCP"


def cross_polar_level(e_theta, e_phi) -> float:
    """Minor-to-major axis ratio in dB (``-AR``); ``-inf`` for pure linear polarization."""
    return -axial_ratio(e_theta, e_phi)


def signed_cut(p: PatternGrid, phi_cut: float):
    """Samples of the great circle through ``phi_cut`` and ``phi_cut + 180``.

    Returns ``(s, i, j)`` where ``s`` is the signed elevation angle in
    ``[-180, 180)``: ``s = theta`` on the ``phi_cut`` half and ``s = -theta``
    on the opposite half.  ``i, j`` index the grid.
    """
    _, j0 = p.index(0.0, phi_cut)
    _, j1 = p.index(0.0, phi_cut + 180.0)
    nt = p.shape[0]
    th = p.theta_deg
    back = np.arange(nt - 1, 0, -1)          # theta 180 .. step, on the far half
    front = np.arange(0, nt - 1)            # theta 0 .. 180 - step
    s = np.concatenate([-th[back], th[front]])
    i = np.concatenate([back, front])
    j = np.concatenate([np.full(len(back), j1), np.full(len(front), j0)])
    return s, i, j


def beam_peak(p: PatternGrid, phi_cut: float | None = None, theta_cut: float | None = None):
    """Grid argmax of ``U`` as ``(theta, phi)``, optionally inside one cut.

    Ties (within a relative ``1e-12``, which absorbs rounding noise along the
    degenerate theta = 0 row) go to the smallest theta, then the smallest phi.
    """
    U = p.intensity
    if not np.any(U > 0):
        raise DomainError("all-zero pattern has no peak")
    mask = np.ones(U.shape, dtype=bool)
    if phi_cut is not None:
        mask[:] = False
        _, j0 = p.index(0.0, phi_cut)
        _, j1 = p.index(0.0, phi_cut + 180.0)
        mask[:, [j0, j1]] = True
    if theta_cut is not None:
        i0, _ = p.index(theta_cut, 0.0)
        rows = np.zeros(U.shape, dtype=bool)
        rows[i0, :] = True
        mask &= rows
    masked = np.where(mask, U, -np.inf)
    top = masked.max()
    i, j = np.unravel_index(int(np.argmax(masked >= top * (1 - _TIE_TOL))), U.shape)
    return float(p.theta_deg[i]), float(p.phi_deg[j])


def to_signed(theta: float, phi: float, phi_cut: float) -> float:
    """Signed elevation of direction ``(theta, phi)`` lying in the ``phi_cut`` plane."""
    d = (phi - phi_cut) % 360.0
    if theta == 0 or theta == 180 or abs(d) < 1e-9 or abs(d - 360) < 1e-9:
        return theta
    if abs(d - 180.0) < 1e-9:
        return -theta
    raise DomainError(f"direction ({theta}, {phi}) is not in the phi={phi_cut} plane")


class Beamwidth(NamedTuple):
    """Half-power beamwidth of one cut.  ``flagged`` marks a missing or unresolved crossing."""

    width: float
    lower: float
    upper: float
    flagged: bool


def hpbw(p: PatternGrid, phi_cut: float) -> Beamwidth:
    """-3 dB beamwidth in the ``phi_cut`` plane, around the cut peak.

    Crossings are linearly interpolated in ``U`` between grid nodes.  The
    result is flagged (``width = nan``) when no crossing exists on one side
    or when both neighbours of the peak already lie below half power.
    """
    s, i, j = signed_cut(p, phi_cut)
    u = p.intensity[i, j]
    n = len(s)
    th0, ph0 = beam_peak(p, phi_cut=phi_cut)
    s0 = to_signed(th0, ph0, phi_cut)
    k0 = int(np.flatnonzero(np.isclose(s, s0, atol=1e-9) | np.isclose(s, s0 - 360, atol=1e-9))[0])
    half = 0.5 * u[k0]
    if u[k0] == 0:
        raise DomainError("cut carries no power")
    step = p.theta_step

    def walk(direction):
        prev = u[k0]
        for q in range(1, n):
            k = (k0 + direction * q) % n
            if u[k] < half:
                frac = (prev - half) / (prev - u[k])
                return (q - 1 + frac) * step, q
            prev = u[k]
        return None, None

    up, qu = walk(+1)
    lo, ql = walk(-1)
    if up is None or lo is None or (qu == 1 and ql == 1):
        return Beamwidth(float("nan"), float("nan"), float("nan"), True)
    return Beamwidth(float(up + lo), float(s[k0] - lo), float(s[k0] + up), False)


def ripple(p: PatternGrid, theta_cut: float, phi_range: tuple[float, float] | None = None) -> float:
    """Peak-to-trough variation of ``U`` in dB around the ``theta_cut`` cone."""
    i, _ = p.index(theta_cut, 0.0)
    u = p.intensity[i]
    if phi_range is not None:
        ph = p.phi_deg
        lo, hi = phi_range
        u = u[(ph >= lo - 1e-9) & (ph < hi - 1e-9)]
    if u.size == 0:
        raise GridError("empty phi range")
    if u.min() <= 0:
        return float("inf")
    return float(10 * np.log10(u.max() / u.min()))


def electrical_size(f: float, a: float) -> float:
    """``ka`` for frequency ``f`` (Hz) and enclosing-sphere radius ``a`` (m)."""
    if not (f > 0 and a > 0):
        raise DomainError("frequency and radius must be positive")
    return 2 * math.pi * f / constants.c * a


def harrington_gmax(ka: float) -> float:
    """Harrington maximum gain ``(ka)^2 + 2 ka`` in dBi."""
    if not ka > 0:
        raise DomainError("ka must be positive")
    return 10 * math.log10(ka * ka + 2 * ka)


@dataclass
class MetricsReport:
    """Summary metrics of one pattern; serializes to JSON with these field names."""

    directivity_dBi: float
    realized_gain_dBi: float
    peak_direction: tuple[float, float]
    hpbw_deg: dict = field(default_factory=dict)
    ripple_dB: float | None = None
    ar_dB: list = field(default_factory=list)
    ka: float | None = None
    harrington_gmax_dBi: float | None = None
    efficiency: float = 1.0
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False, allow_nan=False) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def evaluate(p: PatternGrid, efficiency: float = 1.0, enclosing_radius: float | None = None,
             phi_cuts=(0.0, 90.0), theta_cut: float | None = 90.0,
             ar_directions=((0.0, 0.0),)) -> MetricsReport:
    """Compute a :class:`MetricsReport` for ``p``.

    ``efficiency`` is a user-supplied total efficiency in ``(0, 1]``; realized
    gain is directivity plus ``10 log10(efficiency)``.  ``ka`` and the
    Harrington bound are filled in when ``enclosing_radius`` (m) is given.
    """
    if not 0 < efficiency <= 1:
        raise DomainError(f"efficiency must lie in (0, 1], got {efficiency}")
    peak = beam_peak(p)
    d = directivity(p, peak)
    report = MetricsReport(directivity_dBi=d,
                           realized_gain_dBi=d + 10 * math.log10(efficiency),
                           peak_direction=peak, efficiency=efficiency)
    for c in phi_cuts:
        bw = hpbw(p, c)
        report.hpbw_deg[f"phi={c:g}"] = bw.width
        if bw.flagged:
            report.flags.append(f"hpbw phi={c:g}: crossing not found or beam unresolved")
    if theta_cut is not None:
        report.ripple_dB = ripple(p, theta_cut)
    for th, ph in ar_directions:
        et, ep = p.sample(th, ph)
        if et == 0 and ep == 0:
            report.ar_dB.append({"theta_deg": th, "phi_deg": ph, "ar_dB": None, "sense": "null"})
            continue
        report.ar_dB.append({"theta_deg": th, "phi_deg": ph,
                             "ar_dB": axial_ratio(et, ep), "sense": polarization_sense(et, ep)})
    if enclosing_radius is not None:
        report.ka = electrical_size(p.frequency, enclosing_radius)
        report.harrington_gmax_dBi = harrington_gmax(report.ka)
        if report.realized_gain_dBi > report.harrington_gmax_dBi + 0.5:
            report.flags.append("realized gain exceeds the Harrington bound by more than 0.5 dB")
    return report
