"""Cavity-model analysis of multiport annular-sector microstrip antennas.

Modules
-------
specfun     Bessel functions of real order and their derivatives
cavity      sector eigenmodes, resonant frequencies and the driven interior field
radiator    far-field patterns from edge magnetic currents, rotation, CSV I/O
synthesis   excitation presets and multiport superposition
metrics     directivity, beam peak/width, ripple, axial ratio, ka, Harrington bound
cli         JSON-configured command-line front end
"""

from .cavity import (DrivenField, FeedPoint, Mode, SectorGeometry, driven_field,
                     eigenfunction, solve_modes)
from .metrics import (MetricsReport, axial_ratio, beam_peak, directivity, electrical_size,
                      harrington_gmax, hpbw, ripple)
from .pattern import PatternGrid, load_pattern, rotate_pattern, save_pattern
from .radiator import AperturePerimeter, embedded_pattern
from .specfun import bessel_deriv, bessel_j, bessel_y
from .synthesis import ExcitationSet, preset, superpose

__version__ = "0.1.0"

__all__ = [
    "AperturePerimeter", "DrivenField", "ExcitationSet", "FeedPoint", "MetricsReport", "Mode",
    "PatternGrid", "SectorGeometry", "axial_ratio", "beam_peak", "bessel_deriv", "bessel_j",
    "bessel_y", "directivity", "driven_field", "eigenfunction", "electrical_size",
    "embedded_pattern", "harrington_gmax", "hpbw", "load_pattern", "preset", "ripple",
    "rotate_pattern", "save_pattern", "solve_modes", "superpose",
]
