"""Multiport superposition of embedded patterns and the excitation presets.

Port ``P1`` is the generating sector; the other ports are P1 rotated in
90 degree steps clockwise seen from +z (P1 in quadrant II, then I, IV, III).
That ordering makes the P1+P4 and P2+P3 pairs straddle the xz-plane and the
P1+P2 and P3+P4 pairs straddle the yz-plane, and makes the 0/90/180/270
degree sequence right-hand circular at broadside.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GridError
from .pattern import PatternGrid, rotate_pattern

#: Quarter turns applied to P1 to obtain port l (index 0 is P1).
PORT_QUARTER_TURNS = (0, -1, -2, -3)

# (amplitude, phase in degrees) per port; None marks an unexcited port.
_TABLE = {
    "beam-Q1-xz": ((1, 0), None, None, (1, 0)),
    "beam-Q2-xz": (None, (1, 0), (1, 0), None),
    "beam-Q1-yz": ((1, 0), (1, 0), None, None),
    "beam-Q2-yz": (None, None, (1, 0), (1, 0)),
    "omni-HP": ((1, 0), (1, 0), (1, 0), (1, 0)),
    "broadside-LP": ((1, 0), (1, 0), (1, 180), (1, 180)),
    "DP-minus45": ((1, 0), None, (1, 180), None),
    "DP-plus45": (None, (1, 0), None, (1, 180)),
    "RHCP": ((1, 0), (1, 90), (1, 180), (1, 270)),
    "LHCP": ((1, 270), (1, 180), (1, 90), (1, 0)),
}

#: Reference beam direction, polarization and full-wave realized gain (dBi) of each preset.
PRESET_REFERENCE = {
    "beam-Q1-xz": ("theta=-35, phi=0", "LP", 3.44),
    "beam-Q2-xz": ("theta=35, phi=0", "LP", 3.44),
    "beam-Q1-yz": ("theta=-35, phi=90", "LP", 3.47),
    "beam-Q2-yz": ("theta=35, phi=90", "LP", 3.47),
    "omni-HP": ("omnidirectional", "HP", 0.23),
    "broadside-LP": ("theta=0, phi=0", "LP", 4.59),
    "DP-minus45": ("theta=0, phi=-45", "DP", 4.59),
    "DP-plus45": ("theta=0, phi=45", "DP", 4.59),
    "RHCP": ("theta=0, phi=0", "RHCP", 4.56),
    "LHCP": ("theta=0, phi=0", "LHCP", 4.56),
}

PRESET_NAMES = tuple(_TABLE)


def phasor(amplitude: float, phase_deg: float) -> complex:
    """``amplitude * exp(j phase)``, exact for multiples of 90 degrees."""
    q, r = divmod(float(phase_deg), 90.0)
    if r == 0.0:
        unit = (1, 1j, -1, -1j)[int(q) % 4]
        return complex(amplitude * unit)
    return amplitude * cmath.exp(1j * math.radians(phase_deg))


@dataclass(frozen=True)
class ExcitationSet:
    """Complex port coefficients ``c_l = |A_l| exp(j dbeta_l)`` with activity flags."""

    coefficients: tuple
    active: tuple
    preset_name: str | None = None

    def __post_init__(self):
        c = tuple(complex(x) for x in self.coefficients)
        a = tuple(bool(x) for x in self.active)
        if len(c) != len(a):
            raise DomainError("coefficients and active flags differ in length")
        if not all(cmath.isfinite(x) for x in c):
            raise DomainError("excitation coefficients must be finite")
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "active", a)

    @classmethod
    def from_polar(cls, pairs, preset_name=None) -> "ExcitationSet":
        """Build from ``(amplitude, phase_deg)`` pairs; ``None`` marks an inactive port."""
        coef, active = [], []
        for pair in pairs:
            if pair is None:
                coef.append(0j)
                active.append(False)
                continue
            amp, ph = pair
            if amp < 0:
                raise DomainError(f"amplitude must be >= 0, got {amp}")
            coef.append(phasor(amp, ph))
            active.append(True)
        return cls(tuple(coef), tuple(active), preset_name)

    @classmethod
    def from_coefficients(cls, coefficients, preset_name=None) -> "ExcitationSet":
        c = tuple(complex(x) for x in coefficients)
        return cls(c, tuple(True for _ in c), preset_name)

    @property
    def ports(self) -> int:
        return len(self.coefficients)

    @property
    def amplitudes(self) -> tuple:
        return tuple(abs(c) if a else 0.0 for c, a in zip(self.coefficients, self.active))

    @property
    def phases_deg(self) -> tuple:
        """Phases in ``[0, 360)`` degrees (``None`` for inactive ports)."""
        return tuple(math.degrees(cmath.phase(c)) % 360.0 if a else None
                     for c, a in zip(self.coefficients, self.active))

    def effective(self) -> tuple:
        """Coefficients with inactive ports forced to exactly zero."""
        return tuple(c if a else 0j for c, a in zip(self.coefficients, self.active))

    def scaled(self, factor: complex) -> "ExcitationSet":
        return ExcitationSet(tuple(factor * c for c in self.coefficients), self.active)

    def __add__(self, other: "ExcitationSet") -> "ExcitationSet":
        if self.ports != other.ports:
            raise DomainError("cannot add excitations with different port counts")
        return ExcitationSet(tuple(a + b for a, b in zip(self.effective(), other.effective())),
                             tuple(x or y for x, y in zip(self.active, other.active)))


def preset(name: str) -> ExcitationSet:
    """Excitation row for one of :data:`PRESET_NAMES` (ports P1..P4)."""
    try:
        row = _TABLE[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}") from None
    return ExcitationSet.from_polar(row, preset_name=name)


def port_patterns(p1: PatternGrid, ports: int = 4) -> list[PatternGrid]:
    """Embedded patterns of all ports, generated by rotating the P1 pattern."""
    if ports != 4:
        raise DomainError("the rotational port layout is defined for four ports")
    return [rotate_pattern(p1, q) for q in PORT_QUARTER_TURNS]


def _ordered_sum(terms: np.ndarray) -> np.ndarray:
    # Sorting real and imaginary parts along the port axis first makes the
    # floating-point result independent of port order.
    return np.sort(terms.real, axis=0).sum(axis=0) + 1j * np.sort(terms.imag, axis=0).sum(axis=0)


def superpose(patterns, exc: ExcitationSet) -> PatternGrid:
    """Node-wise ``sum_l c_l E_l`` for both field components.

    Inactive ports contribute exactly zero.  The summation order is fixed by
    value, so permuting ports leaves the result bit-identical.
    """
    patterns = list(patterns)
    if len(patterns) != exc.ports:
        raise DomainError(f"{len(patterns)} patterns but {exc.ports} excitation coefficients")
    if not patterns:
        raise DomainError("need at least one pattern")
    ref = patterns[0]
    for q in patterns[1:]:
        if not ref.same_grid(q):
            raise GridError("port patterns use different grids")
        if q.frequency != ref.frequency:
            raise GridError("port patterns are at different frequencies")
    coef = exc.effective()
    if len(patterns) == 1:
        c = coef[0]
        et = ref.e_theta * c if c != 1 else ref.e_theta
        ep = ref.e_phi * c if c != 1 else ref.e_phi
    else:
        live = [(c, q) for c, q in zip(coef, patterns) if c != 0]
        if not live:
            et = np.zeros(ref.shape, dtype=complex)
            ep = np.zeros(ref.shape, dtype=complex)
        else:
            et = _ordered_sum(np.stack([c * q.e_theta for c, q in live]))
            ep = _ordered_sum(np.stack([c * q.e_phi for c, q in live]))
    meta = dict(ref.metadata)
    meta["excitation"] = exc.preset_name or "custom"
    return PatternGrid(ref.theta_step, ref.phi_step, et, ep, ref.frequency,
                       "field-unnormalized", meta)
