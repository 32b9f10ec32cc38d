"""Cylindrical Bessel functions of real, non-negative order.

The cavity eigenproblem of an annular sector of angle ``alpha`` needs
``J_v``, ``Y_v`` and their derivatives at ``v = n*pi/alpha``, which is
integer only for special sector angles.  Values come from the AMOS/Cephes
kernels in :mod:`scipy.special`; this module adds argument validation, an
explicit accuracy box and the derivative recurrence.

All functions broadcast over numpy arrays and are pure.
"""

from __future__ import annotations

import numpy as np
from scipy import special

from .errors import DomainError, RangeError

#: Supported accuracy box.  Inputs outside raise :class:`RangeError`.
MAX_ORDER = 20.0
MAX_ARG = 100.0


def order(n, alpha):
    """Azimuthal Bessel order ``v = n*pi/alpha`` of sector mode index ``n``."""
    if alpha <= 0 or not np.isfinite(alpha):
        raise DomainError(f"sector angle must be positive and finite, got {alpha!r}")
    if np.any(np.asarray(n) < 0):
        raise DomainError("azimuthal index n must be non-negative")
    return np.asarray(n) * np.pi / alpha


def _check(v, x, allow_zero):
    v = np.asarray(v, dtype=float)
    x = np.asarray(x, dtype=float)
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(x))):
        raise DomainError("order and argument must be finite")
    if np.any(v < 0):
        raise DomainError("order v must be >= 0")
    if np.any(x < 0):
        raise DomainError("argument x must be >= 0")
    zero = x == 0
    if np.any(zero):
        if not allow_zero:
            raise DomainError("argument x must be > 0")
        vz = np.broadcast_to(v, np.broadcast(v, x).shape)[np.broadcast_to(zero, np.broadcast(v, x).shape)]
        if np.any(vz != np.round(vz)):
            raise DomainError("x = 0 requires an integer order")
    if np.any(v > MAX_ORDER):
        raise RangeError(f"order above supported maximum {MAX_ORDER}")
    if np.any(x > MAX_ARG):
        raise RangeError(f"argument above supported maximum {MAX_ARG}")
    return v, x


def _yv(v, x):
    # Integer orders go through the Cephes recurrence, much faster than AMOS.
    # AMOS yv returns 0 for subnormal orders; an order within 1e-30 of an
    # integer is that integer to double precision, so snap it.
    v = np.asarray(v, dtype=float)
    n = np.round(v)
    snap = np.abs(v - n) <= 1e-30
    if np.all(snap):
        return special.yn(n.astype(int), x)
    out = special.yv(v, x)
    if np.any(snap):
        out = np.where(snap, special.yn(np.where(snap, n, 0).astype(int), x), out)
    return out


def _scalar(out):
    return out.item() if np.ndim(out) == 0 else out


def bessel_j(v, x):
    """Bessel function of the first kind ``J_v(x)``.

    ``x = 0`` is accepted for integer orders only.
    """
    v, x = _check(v, x, allow_zero=True)
    return _scalar(special.jv(v, x))


def bessel_y(v, x):
    """Bessel function of the second kind ``Y_v(x)`` (Neumann function), ``x > 0``."""
    v, x = _check(v, x, allow_zero=False)
    return _scalar(_yv(v, x))


def bessel_deriv(kind, v, x):
    """First derivative ``C'_v(x)`` of ``J_v`` (``kind="J"``) or ``Y_v`` (``kind="Y"``).

    Uses ``C'_v = (C_{v-1} - C_{v+1}) / 2``, valid for every real order.
    """
    kind = str(kind).upper()
    if kind not in ("J", "Y"):
        raise ValueError(f"kind must be 'J' or 'Y', got {kind!r}")
    v, x = _check(v, x, allow_zero=False)
    f = special.jv if kind == "J" else _yv
    return _scalar(0.5 * (f(v - 1.0, x) - f(v + 1.0, x)))


def cross_derivatives(v, x):
    """Return ``(J'_v(x), Y'_v(x))`` in one call (argument checks applied once)."""
    v, x = _check(v, x, allow_zero=False)
    jd = 0.5 * (special.jv(v - 1.0, x) - special.jv(v + 1.0, x))
    yd = 0.5 * (_yv(v - 1.0, x) - _yv(v + 1.0, x))
    return jd, yd
