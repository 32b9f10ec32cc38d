"""Far-field radiation of a cavity-model sector.

The fringing field at the magnetic walls is replaced by an equivalent
magnetic line current ``M = -2 t (n x z) E_z`` (``n`` the outward in-plane
normal, ``t`` the substrate height, factor 2 from the ground-plane image).
The far field of ``M`` over an infinite ground plane is

    E_theta = -j k0 / (4 pi) L_phi,    E_phi = j k0 / (4 pi) L_theta,
    L = sum_nodes w M exp(+j k0 r_hat . r')

with the common ``exp(-j k0 r) / r`` factor dropped.  The lower hemisphere
is evaluated from the same integral and flagged as an idealization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import metrics
from .cavity import C0, SectorGeometry
from .errors import ConvergenceError, DomainError
from .pattern import PatternGrid, grid_shape, load_pattern, rotate_pattern, save_pattern

__all__ = ["AperturePerimeter", "Segment", "embedded_pattern", "radiate", "magnetic_moment",
           "load_pattern", "save_pattern", "rotate_pattern", "PatternGrid"]

MIN_NODES = 8
DEFAULT_ARC_NODES = 64
DEFAULT_EDGE_NODES = 32
CONVERGENCE_DB = 0.05


@dataclass(frozen=True)
class Segment:
    """One boundary piece with Gauss-Legendre nodes.

    ``rho``/``phi`` are sector-local node coordinates, ``x``/``y`` global
    positions (m), ``tx``/``ty`` the unit direction of ``-(n x z)`` and
    ``w`` the arc-length weights (m).
    """

    name: str
    rho: np.ndarray
    phi: np.ndarray
    x: np.ndarray
    y: np.ndarray
    tx: np.ndarray
    ty: np.ndarray
    w: np.ndarray


class AperturePerimeter:
    """Closed contour of the sector: outer arc, inner arc and the two radial edges."""

    def __init__(self, geom: SectorGeometry, arc_nodes: int = DEFAULT_ARC_NODES,
                 edge_nodes: int = DEFAULT_EDGE_NODES):
        if arc_nodes < MIN_NODES or edge_nodes < MIN_NODES:
            raise DomainError(f"each segment needs at least {MIN_NODES} quadrature nodes")
        self.geom = geom
        self.arc_nodes = int(arc_nodes)
        self.edge_nodes = int(edge_nodes)
        self.segments = self._build()

    def refined(self) -> "AperturePerimeter":
        """Same contour with every node count doubled."""
        return AperturePerimeter(self.geom, 2 * self.arc_nodes, 2 * self.edge_nodes)

    def _build(self):
        g = self.geom
        segs = []
        u, wu = leggauss(self.arc_nodes)
        phi = 0.5 * g.alpha * (u + 1)
        dphi = 0.5 * g.alpha * wu
        gphi = g.start_angle + phi
        # -(n x z) = +phi_hat on the outer arc (n = +rho_hat), -phi_hat on the inner arc.
        for name, r, sign in (("outer", g.r_e, 1.0), ("inner", g.r_i, -1.0)):
            segs.append(Segment(name, np.full_like(phi, r), phi,
                                r * np.cos(gphi), r * np.sin(gphi),
                                -sign * np.sin(gphi), sign * np.cos(gphi), r * dphi))
        u, wu = leggauss(self.edge_nodes)
        rho = g.r_i + 0.5 * (g.r_e - g.r_i) * (u + 1)
        drho = 0.5 * (g.r_e - g.r_i) * wu
        # -(n x z) = -rho_hat at local phi = alpha (n = +phi_hat), +rho_hat at phi = 0.
        for name, lphi, sign in (("edge0", 0.0, 1.0), ("edge_alpha", g.alpha, -1.0)):
            a = g.start_angle + lphi
            segs.append(Segment(name, rho, np.full_like(rho, lphi),
                                rho * math.cos(a), rho * math.sin(a),
                                np.full_like(rho, sign * math.cos(a)),
                                np.full_like(rho, sign * math.sin(a)), drho))
        return tuple(segs)

    def currents(self, field):
        """Node positions, Cartesian line-current components and weights for ``field``."""
        t = self.geom.t
        xs, ys, mx, my, ws = [], [], [], [], []
        for s in self.segments:
            ez = np.asarray(field(s.rho, s.phi), dtype=complex)
            xs.append(s.x)
            ys.append(s.y)
            mx.append(2 * t * ez * s.tx)
            my.append(2 * t * ez * s.ty)
            ws.append(s.w)
        return (np.concatenate(xs), np.concatenate(ys), np.concatenate(mx),
                np.concatenate(my), np.concatenate(ws))


def magnetic_moment(perimeter: AperturePerimeter, field) -> np.ndarray:
    """Net line-current moment ``sum w M`` as a complex ``(Mx, My)`` pair."""
    _, _, mx, my, w = perimeter.currents(field)
    return np.array([np.sum(w * mx), np.sum(w * my)])


def radiate(perimeter: AperturePerimeter, field, f: float, theta_step: float = 1.0,
            phi_step: float = 1.0) -> PatternGrid:
    """Far field of the perimeter currents on a regular grid (single quadrature level)."""
    if not f > 0:
        raise DomainError("frequency must be positive")
    k0 = 2 * math.pi * f / C0
    x, y, mx, my, w = perimeter.currents(field)
    wmx, wmy = w * mx, w * my
    nt, nphi = grid_shape(theta_step, phi_step)
    th = np.radians(np.arange(nt) * theta_step)
    ph = np.radians(np.arange(nphi) * phi_step)
    cph, sph = np.cos(ph), np.sin(ph)
    proj = np.outer(cph, x) + np.outer(sph, y)          # (nphi, nodes)
    et = np.empty((nt, nphi), dtype=complex)
    ep = np.empty((nt, nphi), dtype=complex)
    pref = 1j * k0 / (4 * math.pi)
    for i, t in enumerate(th):
        kern = np.exp(1j * k0 * math.sin(t) * proj)
        lx = kern @ wmx
        ly = kern @ wmy
        l_theta = math.cos(t) * (lx * cph + ly * sph)
        l_phi = -lx * sph + ly * cph
        et[i] = -pref * l_phi
        ep[i] = pref * l_theta
    g = perimeter.geom
    meta = {"model": "cavity magnetic-current, infinite ground plane",
            "lower_hemisphere": "infinite-ground idealization",
            "arc_nodes": str(perimeter.arc_nodes), "edge_nodes": str(perimeter.edge_nodes),
            "phi_0_deg": format(math.degrees(g.phi_0), ".12g")}
    return PatternGrid(theta_step, phi_step, et, ep, f, metadata=meta)


def embedded_pattern(geom: SectorGeometry, field, f: float, grid=(1.0, 1.0),
                     quad: AperturePerimeter | None = None, *, max_doublings: int = 4,
                     tol_db: float = CONVERGENCE_DB) -> PatternGrid:
    """Radiation pattern of one sector with automatic quadrature refinement.

    Node counts are doubled until the peak directivity changes by at most
    ``tol_db``; the finer of the last two patterns is returned.

    Parameters
    ----------
    field : callable
        Interior ``E_z(rho, phi)`` in sector-local coordinates, typically a
        :class:`~sectorpatch.cavity.DrivenField`.
    grid : (theta_step, phi_step)
        Grid spacings in degrees.
    """
    quad = quad or AperturePerimeter(geom)
    if quad.geom != geom:
        raise DomainError("quadrature perimeter belongs to a different geometry")
    wavelength = C0 / f
    d_prev = metrics.directivity(radiate(quad, field, f, *grid))
    change = float("nan")
    for _ in range(max_doublings):
        quad = quad.refined()
        finer = radiate(quad, field, f, *grid)
        d = metrics.directivity(finer)
        change = abs(d - d_prev)
        if change <= tol_db:
            meta = dict(finer.metadata, far_field_distance_m=format(8 * geom.r_e ** 2 / wavelength, ".12g"))
            return finer.replace(metadata=meta)
        d_prev = d
    raise ConvergenceError(
        f"peak directivity still changing by {change:.3g} dB after "
        f"{max_doublings} node doublings ({quad.arc_nodes} arc nodes)")
