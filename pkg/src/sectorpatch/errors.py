"""Exception hierarchy shared by all sectorpatch modules."""


class SectorPatchError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SectorPatchError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class RangeError(SectorPatchError, ValueError):
    """Argument inside the domain but outside the supported accuracy box."""


class RootNotFoundError(SectorPatchError, RuntimeError):
    """The cavity root scan found fewer roots than requested."""


class ConvergenceError(SectorPatchError, RuntimeError):
    """Radiation quadrature did not converge within the allowed refinements."""


class GridError(SectorPatchError, ValueError):
    """Pattern grids are irregular, incompatible, or do not cover the sphere."""


class PatternFileError(SectorPatchError, ValueError):
    """Pattern CSV violates the file schema."""


class ConfigError(SectorPatchError, ValueError):
    """Run configuration failed validation."""
