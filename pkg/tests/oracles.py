"""Reference computations that share no code path with the package."""

import numpy as np
from scipy import special


def brute_force_roots(v, ratio, count, step=1e-4, x_max=60.0, block=20000):
    """Dense sign scan of the raw determinant followed by plain bisection."""
    def delta(x):
        return (special.jvp(v, x * ratio) * special.yvp(v, x)
                - special.jvp(v, x) * special.yvp(v, x * ratio))

    roots, start = [], 1
    last = None
    while len(roots) < count and start * step < x_max:
        xs = np.arange(start, start + block) * step
        d = delta(xs)
        if last is not None:
            xs, d = np.concatenate([[last[0]], xs]), np.concatenate([[last[1]], d])
        for i in np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0):
            a, b = xs[i], xs[i + 1]
            fa = delta(a)
            for _ in range(200):
                m = 0.5 * (a + b)
                if m in (a, b):
                    break
                fm = delta(m)
                if np.sign(fm) == np.sign(fa):
                    a, fa = m, fm
                else:
                    b = m
            roots.append(0.5 * (a + b))
            if len(roots) == count:
                break
        last = (xs[-1], d[-1])
        start += block
    return np.array(roots)
