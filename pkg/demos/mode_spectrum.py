# Resonances of a quarter-annulus patch on a 1.27 mm, eps_r = 6.3 substrate.
#
# The interior of the patch is treated as a cavity with electric walls top
# and bottom and magnetic walls around the rim.  Each mode is labelled by
# (n, m): n counts half-waves across the sector angle, m counts radial roots.
import dataclasses
import math

import numpy as np

from sectorpatch import SectorGeometry, solve_modes
from sectorpatch.cavity import cross_product_roots, normalized_characteristic

geom = SectorGeometry(r_i=1.5e-3, r_e=14e-3, alpha=math.pi / 2, phi_0=math.radians(135),
                      t=1.27e-3, eps_r=6.3, tan_delta=0.0023)

modes = solve_modes(geom, n_max=4, m_max=3)
print(" n  m      v        x_mv      f (GHz)")
for md in modes:
    print(f"{md.n:2d} {md.m:2d}  {md.v:6.2f}  {md.x_mv:10.6f}  {md.f_res / 1e9:8.4f}")

# The lowest resonance sits near 4.2 GHz.  Each root solves a cross
# product of Bessel derivatives; the normalized form stays in [-1, 1], which
# makes a plain sign scan robust even where Y'_v blows up near the hub.
x = np.linspace(0.5, 12.0, 12)
print("\nnormalized characteristic, v = 2:")
print(np.round(normalized_characteristic(x, 2.0, geom.ratio), 4))
print("first three roots:", cross_product_roots(2.0, geom.ratio, 3))

# Frequencies fall as 1/sqrt(eps_r).  Swapping to air multiplies every
# resonance by sqrt(6.3) exactly.
air = solve_modes(dataclasses.replace(geom, eps_r=1.0), 4, 3)
print("\nair / substrate frequency ratio:", air[0].f_res / modes[0].f_res, math.sqrt(6.3))
