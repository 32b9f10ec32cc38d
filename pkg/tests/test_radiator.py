import math

import numpy as np
import pytest
from scipy import integrate

from conftest import ant_a, default_feed
from sectorpatch import cavity, metrics, radiator
from sectorpatch.errors import ConvergenceError, DomainError
from sectorpatch.pattern import rotate_pattern


def unit_vectors(theta, phi):
    st, ct, sp, cp = np.sin(theta), np.cos(theta), np.sin(phi), np.cos(phi)
    r = np.array([st * cp, st * sp, ct])
    th = np.array([ct * cp, ct * sp, -st])
    ph = np.array([-sp, cp, 0.0 * st])
    return r, th, ph


def direct_far_field(perimeter, field, f, theta, phi):
    """E = j k/(4 pi) r_hat x L with L = sum w M exp(j k r_hat . r'), in Cartesian form."""
    k = 2 * math.pi * f / cavity.C0
    x, y, mx, my, w = perimeter.currents(field)
    r, th, ph = unit_vectors(theta, phi)
    phase = np.exp(1j * k * (r[0] * x + r[1] * y))
    L = np.array([np.sum(w * mx * phase), np.sum(w * my * phase), 0.0])
    E = 1j * k / (4 * math.pi) * np.cross(r, L)
    return E @ th, E @ ph


def test_radiate_matches_direct_summation(geom, field, fundamental):
    quad = radiator.AperturePerimeter(geom)
    p = radiator.radiate(quad, field, fundamental.f_res, 10.0, 10.0)
    for theta, phi in ((0, 0), (30, 40), (90, 130), (150, 270), (60, 350)):
        et, ep = direct_far_field(quad, field, fundamental.f_res,
                                  math.radians(theta), math.radians(phi))
        gt, gp = p.sample(theta, phi)
        scale = math.sqrt(p.intensity.max())
        assert abs(gt - et) <= 1e-12 * scale and abs(gp - ep) <= 1e-12 * scale


def _moment_by_adaptive_quadrature(geom, field):
    """Net moment of -2 t (n x z) E_z around the contour, by scipy quad."""
    t = geom.t
    a0 = geom.start_angle

    def cquad(fn, a, b):
        re = integrate.quad(lambda s: fn(s).real, a, b, epsabs=0, epsrel=1e-12, limit=200)[0]
        im = integrate.quad(lambda s: fn(s).imag, a, b, epsabs=0, epsrel=1e-12, limit=200)[0]
        return re + 1j * im

    m = np.zeros(2, dtype=complex)
    # -(n x z): +phi_hat on the outer arc, -phi_hat on the inner arc
    for r, sgn in ((geom.r_e, 1.0), (geom.r_i, -1.0)):
        for comp, fn in ((0, lambda p: -math.sin(a0 + p)), (1, lambda p: math.cos(a0 + p))):
            m[comp] += cquad(lambda p: 2 * t * sgn * fn(p) * complex(field(r, p)) * r,
                             0.0, geom.alpha)
    # -rho_hat at local phi = alpha, +rho_hat at phi = 0
    for lphi, sgn in ((0.0, 1.0), (geom.alpha, -1.0)):
        d = np.array([math.cos(a0 + lphi), math.sin(a0 + lphi)])
        for comp in (0, 1):
            m[comp] += cquad(lambda s: 2 * t * sgn * d[comp] * complex(field(s, lphi)),
                             geom.r_i, geom.r_e)
    return m


def test_tiny_sector_is_a_magnetic_dipole():
    f = 4.0e9
    lam = cavity.C0 / f
    g = ant_a(r_i=0.107 * lam / 1000, r_e=lam / 1000, t=1e-6)
    fld = cavity.driven_field(g, cavity.FeedPoint(0.6 * g.r_e, 0.3 * g.alpha), f)
    quad = radiator.AperturePerimeter(g)
    p = radiator.radiate(quad, fld, f, 5.0, 5.0)

    m = _moment_by_adaptive_quadrature(g, fld)
    np.testing.assert_allclose(radiator.magnetic_moment(quad, fld), m, rtol=1e-8)
    k = 2 * math.pi * f / cavity.C0
    th, ph = np.meshgrid(np.radians(p.theta_deg), np.radians(p.phi_deg), indexing="ij")
    # r_hat x m for a horizontal moment, projected on theta_hat and phi_hat
    et = -1j * k / (4 * math.pi) * (-m[0] * np.sin(ph) + m[1] * np.cos(ph))
    ep = 1j * k / (4 * math.pi) * np.cos(th) * (m[0] * np.cos(ph) + m[1] * np.sin(ph))
    err = np.sqrt(np.mean(np.abs(p.e_theta - et) ** 2 + np.abs(p.e_phi - ep) ** 2))
    ref = np.sqrt(np.mean(np.abs(et) ** 2 + np.abs(ep) ** 2))
    assert err / ref <= 0.01


def test_rotation_equivariance(geom, fundamental):
    f = fundamental.f_res
    feed = default_feed()
    a = radiator.radiate(radiator.AperturePerimeter(geom),
                         cavity.driven_field(geom, feed, f), f, 3.0, 3.0)
    g2 = geom.rotated(math.pi / 2)
    b = radiator.radiate(radiator.AperturePerimeter(g2),
                         cavity.driven_field(g2, feed, f), f, 3.0, 3.0)
    r = rotate_pattern(a, 1)
    scale = math.sqrt(a.intensity.max())
    assert np.max(np.abs(b.e_theta - r.e_theta)) <= 1e-12 * scale
    assert np.max(np.abs(b.e_phi - r.e_phi)) <= 1e-12 * scale


def test_quadrature_doubling_changes_samples_little(geom, field, fundamental):
    f = fundamental.f_res
    quad = radiator.AperturePerimeter(geom)
    a = radiator.radiate(quad, field, f, 5.0, 5.0)
    b = radiator.radiate(quad.refined(), field, f, 5.0, 5.0)
    peak = math.sqrt(b.intensity.max())
    diff = np.sqrt(np.abs(a.e_theta - b.e_theta) ** 2 + np.abs(a.e_phi - b.e_phi) ** 2)
    assert diff.max() < 0.005 * peak


def test_embedded_pattern_converges(p1, geom):
    assert int(p1.metadata["arc_nodes"]) >= radiator.DEFAULT_ARC_NODES * 2
    assert p1.metadata["lower_hemisphere"] == "infinite-ground idealization"
    assert float(p1.metadata["far_field_distance_m"]) > 0


def test_convergence_failure_is_reported(geom, field, fundamental):
    with pytest.raises(ConvergenceError, match="doublings"):
        radiator.embedded_pattern(geom, field, fundamental.f_res, (10.0, 10.0),
                                  max_doublings=1, tol_db=0.0)


def test_fundamental_is_linear_at_broadside(p1):
    et, ep = p1.sample(0.0, 0.0)
    assert metrics.cross_polar_level(et, ep) <= -20.0
    assert metrics.beam_peak(p1) == (0.0, 0.0)


def test_mirror_symmetry():
    g = ant_a(phi_0_deg=0.0)
    f = 4.1e9
    fld = cavity.driven_field(g, cavity.FeedPoint(8e-3, g.alpha / 2), f)
    p = radiator.radiate(radiator.AperturePerimeter(g), fld, f, 5.0, 5.0)
    U = p.intensity
    mirrored = np.roll(U[:, ::-1], 1, axis=1)     # phi -> -phi
    assert np.max(np.abs(U - mirrored)) <= 1e-10 * U.max()


@pytest.mark.parametrize("f", [3.0e9, 4.1448e9, 5.37e9, 7.0e9])
def test_radiated_power_positive(geom, f):
    fld = cavity.driven_field(geom, default_feed(), f)
    p = radiator.radiate(radiator.AperturePerimeter(geom), fld, f, 5.0, 5.0)
    prad = metrics.radiated_power(p)
    assert math.isfinite(prad) and prad > 0


def test_perimeter_is_closed(geom):
    quad = radiator.AperturePerimeter(geom, 16, 8)
    total = sum(np.sum(s.w) for s in quad.segments)
    expected = geom.alpha * (geom.r_e + geom.r_i) + 2 * (geom.r_e - geom.r_i)
    assert total == pytest.approx(expected, rel=1e-14)
    # a constant line current around a closed loop has zero net moment
    m = radiator.magnetic_moment(quad, lambda rho, phi: np.ones_like(rho))
    assert np.max(np.abs(m)) <= 1e-15 * geom.r_e * geom.t


def test_perimeter_validation(geom):
    with pytest.raises(DomainError):
        radiator.AperturePerimeter(geom, 4, 32)
    with pytest.raises(DomainError):
        radiator.embedded_pattern(geom, None, 4e9, quad=radiator.AperturePerimeter(ant_a(0.0)))
    with pytest.raises(DomainError):
        radiator.radiate(radiator.AperturePerimeter(geom), lambda r, p: 0 * r, 0.0)
