import math
import sys

import numpy as np
import pytest

from sectorpatch import cavity, radiator, synthesis
from sectorpatch.config import DEFAULT_FEED_PHI_DEG, DEFAULT_FEED_RHO_MM


def ant_a(phi_0_deg=135.0, **kw):
    """Reference four-sector element: 1.5/14 mm radii, quarter sector, eps_r 6.3."""
    args = dict(r_i=1.5e-3, r_e=14e-3, alpha=math.pi / 2, phi_0=math.radians(phi_0_deg),
                t=1.27e-3, eps_r=6.3, tan_delta=0.0023)
    args.update(kw)
    return cavity.SectorGeometry(**args)


def default_feed():
    return cavity.FeedPoint(DEFAULT_FEED_RHO_MM * 1e-3, math.radians(DEFAULT_FEED_PHI_DEG))


@pytest.fixture(scope="session")
def geom():
    return ant_a()


@pytest.fixture(scope="session")
def modes(geom):
    return cavity.solve_modes(geom, 4, 3)


@pytest.fixture(scope="session")
def fundamental(modes):
    return cavity.find_mode(modes, 1, 1)


@pytest.fixture(scope="session")
def field(geom, fundamental):
    return cavity.DrivenField(geom, default_feed(), fundamental.f_res)


@pytest.fixture(scope="session")
def p1(geom, field, fundamental):
    return radiator.embedded_pattern(geom, field, fundamental.f_res, (2.0, 2.0))


@pytest.fixture(scope="session")
def ports(p1):
    return synthesis.port_patterns(p1)


def correlation(a, b):
    a = np.ravel(a) - np.mean(a)
    b = np.ravel(b) - np.mean(b)
    return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
