# How close does the element come to the gain ceiling for its size?
#
# The disk of radius 14 mm fits in a sphere of the same radius, so its
# electrical size is ka = 2 pi f a / c.  Harrington's bound gives the best
# directivity any antenna of that size can reach without supergain.
import math

import numpy as np

from sectorpatch import SectorGeometry, directivity, electrical_size, harrington_gmax, solve_modes
from sectorpatch.cavity import FeedPoint, driven_field, find_mode
from sectorpatch.config import DEFAULT_FEED_PHI_DEG, DEFAULT_FEED_RHO_MM
from sectorpatch.radiator import embedded_pattern
from sectorpatch.synthesis import port_patterns, preset, superpose

a = 14e-3
geom = SectorGeometry(r_i=1.5e-3, r_e=a, alpha=math.pi / 2, phi_0=math.radians(135),
                      t=1.27e-3, eps_r=6.3, tan_delta=0.0023)
f0 = find_mode(solve_modes(geom, 1, 1), 1, 1).f_res

for ka in (0.5, 1.0, 1.2, 2.0):
    print(f"ka = {ka:.1f}: Harrington ceiling {harrington_gmax(ka):.2f} dBi")

feed = FeedPoint(DEFAULT_FEED_RHO_MM * 1e-3, math.radians(DEFAULT_FEED_PHI_DEG))
print("\n f (GHz)    ka    D_LP (dBi)  ceiling (dBi)")
for f in np.linspace(0.95 * f0, 1.05 * f0, 5):
    fld = driven_field(geom, feed, f)
    ports = port_patterns(embedded_pattern(geom, fld, f, (3.0, 3.0)))
    d = directivity(superpose(ports, preset("broadside-LP")))
    ka = electrical_size(f, a)
    print(f"{f / 1e9:7.4f}  {ka:5.3f}  {d:9.2f}  {harrington_gmax(ka):12.2f}")
