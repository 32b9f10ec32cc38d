"""Cavity model of a thin annular-sector microstrip patch.

The patch occupies ``r_i <= rho <= r_e``, ``0 <= phi <= alpha`` in sector-local
polar coordinates and is bounded by magnetic walls.  TM_z eigenfunctions are

    psi_mn(rho, phi) = [J_v(k rho) Y'_v(k r_i) - J'_v(k r_i) Y_v(k rho)] cos(v phi)

with ``v = n pi / alpha`` and ``k = k_mv`` a root of the radial cross-product
condition ``J'_v(k r_i) Y'_v(k r_e) = J'_v(k r_e) Y'_v(k r_i)``.  Roots are
solved in the normalized variable ``x = k r_e`` so that they only depend on the
radius ratio ``r_i / r_e``.

Global placement: the sector bisector sits at azimuth ``phi_0`` about the
z-axis, so sector-local ``phi`` maps to global ``phi_0 - alpha/2 + phi``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import constants
from scipy.optimize import brentq

from . import specfun
from .errors import DomainError, RootNotFoundError

C0 = constants.c
MU0 = constants.mu_0

DEFAULT_Q = 200.0
DEFAULT_X_MAX = 40.0
DEFAULT_SCAN_STEP = 1e-3

# Tolerance used when deciding whether a point lies on the closed sector.
_EDGE_TOL = 1e-9


@dataclass(frozen=True)
class SectorGeometry:
    """Annular-sector patch on a grounded substrate.  SI units, angles in radians."""

    r_i: float
    r_e: float
    alpha: float
    phi_0: float = 0.0
    t: float = 1.27e-3
    eps_r: float = 1.0
    tan_delta: float = 0.0

    def __post_init__(self):
        for name in ("r_i", "r_e", "alpha", "phi_0", "t", "eps_r", "tan_delta"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not 0 < self.r_i:
            raise DomainError(f"r_i must be positive, got {self.r_i}")
        if not self.r_i < self.r_e:
            raise DomainError(f"r_i ({self.r_i}) must be smaller than r_e ({self.r_e})")
        if not 0 < self.alpha <= 2 * math.pi:
            raise DomainError(f"alpha must lie in (0, 2*pi], got {self.alpha}")
        if not self.t > 0:
            raise DomainError(f"t must be positive, got {self.t}")
        if not self.eps_r >= 1:
            raise DomainError(f"eps_r must be >= 1, got {self.eps_r}")
        if not self.tan_delta >= 0:
            raise DomainError(f"tan_delta must be >= 0, got {self.tan_delta}")

    @property
    def ratio(self) -> float:
        return self.r_i / self.r_e

    @property
    def start_angle(self) -> float:
        """Global azimuth of the sector edge at local ``phi = 0``."""
        return self.phi_0 - 0.5 * self.alpha

    def check_thin(self, f: float) -> bool:
        """Warn (and return False) when the substrate is not electrically thin at ``f``."""
        wavelength = C0 / f
        if self.t > 0.05 * wavelength:
            warnings.warn(
                f"substrate thickness {self.t:g} m exceeds 0.05 wavelength "
                f"({0.05 * wavelength:g} m) at {f:g} Hz; cavity model is unreliable",
                stacklevel=2,
            )
            return False
        return True

    def rotated(self, angle: float) -> "SectorGeometry":
        """Copy of the geometry rotated by ``angle`` radians about the z-axis."""
        return SectorGeometry(self.r_i, self.r_e, self.alpha, self.phi_0 + angle,
                              self.t, self.eps_r, self.tan_delta)

    def scaled(self, s: float) -> "SectorGeometry":
        """Copy with both radii multiplied by ``s``."""
        return SectorGeometry(s * self.r_i, s * self.r_e, self.alpha, self.phi_0,
                              self.t, self.eps_r, self.tan_delta)


@dataclass(frozen=True)
class Mode:
    """One cavity eigenmode.  ``x_mv = k_mv * r_e`` is dimensionless."""

    m: int
    n: int
    v: float
    x_mv: float
    f_res: float

    def wavenumber(self, geom: SectorGeometry) -> float:
        """Interior resonant wavenumber ``k_mv`` in rad/m."""
        return self.x_mv / geom.r_e


@dataclass(frozen=True)
class FeedPoint:
    """Probe location in sector-local polar coordinates (m, rad)."""

    rho_p: float
    phi_p: float

    def validate(self, geom: SectorGeometry) -> None:
        _check_inside(geom, self.rho_p, self.phi_p)


def resonant_frequency(x_mv, r_e, eps_r):
    """Resonant frequency ``c x / (2 pi r_e sqrt(eps_r))`` of a normalized root."""
    return C0 * np.asarray(x_mv) / (2 * np.pi * r_e * np.sqrt(eps_r))


def characteristic(x, v, ratio):
    """Raw cross-product determinant ``J'_v(x q) Y'_v(x) - J'_v(x) Y'_v(x q)``, ``q = r_i/r_e``."""
    ji, yi = specfun.cross_derivatives(v, np.asarray(x) * ratio)
    je, ye = specfun.cross_derivatives(v, x)
    return ji * ye - je * yi


def normalized_characteristic(x, v, ratio):
    """Determinant divided by ``|C'(x q)| |C'(x)|``, where ``|C'| = hypot(J', Y')``.

    The divisor is strictly positive, so roots and signs coincide with
    :func:`characteristic`; the value equals ``sin`` of a phase difference and
    stays in ``[-1, 1]``, which keeps the residual meaningful when ``Y'`` is
    large near the inner radius.
    """
    ji, yi = specfun.cross_derivatives(v, np.asarray(x) * ratio)
    je, ye = specfun.cross_derivatives(v, x)
    with np.errstate(invalid="ignore", over="ignore"):
        return (ji * ye - je * yi) / (np.hypot(ji, yi) * np.hypot(je, ye))


# Scan points evaluated per block; the scan stops at the first block that
# completes the requested number of roots.
_SCAN_BLOCK = 2048


def _refine(a, b, v, ratio):
    return brentq(normalized_characteristic, a, b, args=(v, ratio),
                  xtol=1e-13 * a, rtol=4 * np.finfo(float).eps, maxiter=200)


@lru_cache(maxsize=512)
def _roots_cached(v, ratio, count, x_max, step):
    n_pts = int(math.floor(x_max / step))
    roots = []
    start = 1
    prev_x = prev_val = None
    while start <= n_pts and len(roots) < count:
        stop = min(start + _SCAN_BLOCK, n_pts + 1)
        xs = np.arange(start, stop) * step
        vals = normalized_characteristic(xs, v, ratio)
        if prev_x is not None:
            xs = np.concatenate([[prev_x], xs])
            vals = np.concatenate([[prev_val], vals])
        finite = np.isfinite(vals)
        s = np.sign(vals)
        change = finite[:-1] & finite[1:] & (s[:-1] * s[1:] < 0)
        exact = np.flatnonzero(finite & (vals == 0.0))
        if prev_x is not None:
            exact = exact[exact > 0]
        cands = sorted([(xs[i], xs[i + 1]) for i in np.flatnonzero(change)]
                       + [(xs[i], xs[i]) for i in exact])
        for a, b in cands:
            r = a if a == b else _refine(a, b, v, ratio)
            if roots and abs(r - roots[-1]) <= 1e-12 * r:
                continue
            roots.append(r)
            if len(roots) == count:
                break
        prev_x, prev_val = xs[-1], vals[-1]
        start = stop
    return tuple(roots)


def cross_product_roots(v, ratio, count, x_max=DEFAULT_X_MAX, step=DEFAULT_SCAN_STEP):
    """First ``count`` positive roots ``x`` of the cross-product condition.

    Scans ``x`` on a uniform grid of spacing ``step`` up to ``x_max`` for sign
    changes and refines each bracket with Brent's method to a width below
    ``1e-12 x``.

    Raises
    ------
    RootNotFoundError
        If fewer than ``count`` roots lie below ``x_max``.
    """
    if not 0 < ratio < 1:
        raise DomainError(f"radius ratio must lie in (0, 1), got {ratio}")
    if count < 1:
        raise DomainError("count must be >= 1")
    roots = _roots_cached(float(v), float(ratio), int(count), float(x_max), float(step))
    if len(roots) < count:
        raise RootNotFoundError(
            f"found {len(roots)} of {count} roots for v={v:.6g}, r_i/r_e={ratio:.6g} "
            f"scanning x in (0, {x_max}] with step {step}; raise x_max"
        )
    return np.array(roots)


def solve_modes(geom: SectorGeometry, n_max: int, m_max: int,
                x_max: float = DEFAULT_X_MAX, step: float = DEFAULT_SCAN_STEP) -> list[Mode]:
    """All modes with ``0 <= n <= n_max`` and ``1 <= m <= m_max``, sorted by frequency."""
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    if m_max < 1:
        raise DomainError(f"m_max must be >= 1, got {m_max}")
    modes = []
    for n in range(n_max + 1):
        v = float(specfun.order(n, geom.alpha))
        for m, x in enumerate(cross_product_roots(v, geom.ratio, m_max, x_max, step), start=1):
            f = float(resonant_frequency(x, geom.r_e, geom.eps_r))
            modes.append(Mode(m=m, n=n, v=v, x_mv=float(x), f_res=f))
    modes.sort(key=lambda md: (md.f_res, md.n, md.m))
    return modes


def find_mode(modes, m, n) -> Mode:
    for md in modes:
        if md.m == m and md.n == n:
            return md
    raise KeyError(f"mode (m={m}, n={n}) not in the solved set")


def _check_inside(geom, rho, phi):
    rho = np.asarray(rho, dtype=float)
    phi = np.asarray(phi, dtype=float)
    rtol = _EDGE_TOL * geom.r_e
    if np.any(rho < geom.r_i - rtol) or np.any(rho > geom.r_e + rtol):
        raise DomainError(f"radius outside [{geom.r_i}, {geom.r_e}]")
    if np.any(phi < -_EDGE_TOL) or np.any(phi > geom.alpha + _EDGE_TOL):
        raise DomainError(f"sector-local angle outside [0, {geom.alpha}]")


def radial_function(geom: SectorGeometry, mode: Mode, rho):
    """Radial factor of the eigenfunction (no domain check)."""
    k = mode.wavenumber(geom)
    v = mode.v
    kri = k * geom.r_i
    jd_i, yd_i = specfun.cross_derivatives(v, kri)
    kr = k * np.asarray(rho, dtype=float)
    return specfun.bessel_j(v, kr) * yd_i - jd_i * specfun.bessel_y(v, kr)


def radial_derivative(geom: SectorGeometry, mode: Mode, rho):
    """``d/drho`` of :func:`radial_function`."""
    k = mode.wavenumber(geom)
    jd_i, yd_i = specfun.cross_derivatives(mode.v, k * geom.r_i)
    jd, yd = specfun.cross_derivatives(mode.v, k * np.asarray(rho, dtype=float))
    return k * (jd * yd_i - jd_i * yd)


def eigenfunction(geom: SectorGeometry, mode: Mode, rho, phi):
    """Unnormalized eigenfunction ``psi_mn(rho, phi)``, sector-local coordinates."""
    _check_inside(geom, rho, phi)
    out = radial_function(geom, mode, rho) * np.cos(mode.v * np.asarray(phi, dtype=float))
    return out.item() if np.ndim(out) == 0 else out


def eigenfunction_norm(geom: SectorGeometry, mode: Mode) -> float:
    """``integral psi^2 rho drho dphi`` over the sector, in closed form.

    Uses the Lommel integral ``int C_v(k r)^2 r dr = r^2/2 [C'_v^2 + (1 - v^2/(k r)^2) C_v^2]``
    with ``C'_v = 0`` on both magnetic walls.
    """
    k = mode.wavenumber(geom)
    v = mode.v

    def term(r):
        c = radial_function(geom, mode, r)
        return 0.5 * (r * r - (v / k) ** 2) * c * c

    radial = term(geom.r_e) - term(geom.r_i)
    angular = geom.alpha if mode.n == 0 else 0.5 * geom.alpha
    return float(radial * angular)


class DrivenField:
    """Interior ``E_z`` of a probe-fed sector as a truncated modal sum.

    Each mode contributes

        j omega mu0 psi(rho, phi) psi(rho', phi') / (N_mn (k_eff^2 - k_mn^2))

    where ``N_mn`` is the eigenfunction norm and
    ``k_eff^2 = k0^2 eps_r (1 - j (tan_delta + 1/Q))``.  Instances are callable
    on sector-local ``(rho, phi)`` arrays.
    """

    def __init__(self, geom: SectorGeometry, feed: FeedPoint, f: float,
                 trunc=(4, 3), q_factor: float = DEFAULT_Q, *,
                 x_max: float = DEFAULT_X_MAX, step: float = DEFAULT_SCAN_STEP):
        if not f > 0:
            raise DomainError(f"frequency must be positive, got {f}")
        if not q_factor > 0:
            raise DomainError(f"q_factor must be positive, got {q_factor}")
        feed.validate(geom)
        n_max, m_max = trunc
        self.geom = geom
        self.feed = feed
        self.frequency = float(f)
        self.q_factor = float(q_factor)
        self.modes = tuple(solve_modes(geom, n_max, m_max, x_max, step))

        omega = 2 * np.pi * f
        k0 = omega / C0
        loss = geom.tan_delta + 1.0 / q_factor
        k2 = k0 * k0 * geom.eps_r * (1 - 1j * loss)
        coef = []
        for md in self.modes:
            kmn = md.wavenumber(geom)
            psi_feed = radial_function(geom, md, feed.rho_p) * np.cos(md.v * feed.phi_p)
            norm = eigenfunction_norm(geom, md)
            coef.append(1j * omega * MU0 * psi_feed / (norm * (k2 - kmn * kmn)))
        #: complex weight multiplying each unnormalized eigenfunction
        self.coefficients = np.array(coef)

    def __call__(self, rho, phi):
        _check_inside(self.geom, rho, phi)
        rho = np.asarray(rho, dtype=float)
        phi = np.asarray(phi, dtype=float)
        out = np.zeros(np.broadcast(rho, phi).shape, dtype=complex)
        for md, c in zip(self.modes, self.coefficients):
            out += c * radial_function(self.geom, md, rho) * np.cos(md.v * phi)
        return out


def driven_field(geom: SectorGeometry, feed: FeedPoint, f: float, trunc=(4, 3),
                 q_factor: float = DEFAULT_Q, **scan) -> DrivenField:
    """Build the driven interior field; see :class:`DrivenField`."""
    return DrivenField(geom, feed, f, trunc, q_factor, **scan)
