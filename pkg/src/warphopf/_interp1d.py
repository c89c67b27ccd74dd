"""Small deterministic 1-D numerics shared by the profile modules.

Everything here is dependency-free on purpose: fixed-step integration and
piecewise cubic Hermite interpolation keep the evaluation of profile
functions reproducible bit-for-bit across runs and thread counts.
"""

import numpy as np


def bisect_root(f, a, b, rel_tol=1e-13, max_iter=400):
    """Bracketed bisection for f(a)*f(b) < 0. Returns the midpoint estimate."""
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise ValueError(f"bisection bracket [{a}, {b}] does not straddle a root")
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if fa * fm < 0.0:
            b, fb = m, fm
        else:
            a, fa = m, fm
        if (b - a) <= rel_tol * max(abs(a), abs(b), 1.0):
            break
    return 0.5 * (a + b)


def cumulative_corrected_trapezoid(x, g, dg):
    """Cumulative integral of g over the nodes x, using nodal derivatives dg.

    Per-interval rule: trapezoid plus the Hermite end-slope correction
    h^2/12 (g'_i - g'_{i+1}); exact for cubics, so the cumulative error is
    O(h^4) like the rest of the interpolation stack.
    """
    x = np.asarray(x, dtype=float)
    h = np.diff(x)
    inc = 0.5 * h * (g[:-1] + g[1:]) + (h * h / 12.0) * (dg[:-1] - dg[1:])
    out = np.empty_like(x)
    out[0] = 0.0
    np.cumsum(inc, out=out[1:])
    return out


class CubicHermite:
    """Piecewise cubic Hermite interpolant on a strictly monotone node set.

    Nodes may be non-uniform. Evaluation is vectorized; queries are clipped
    to the node range (callers enforce domain checks themselves).
    """

    def __init__(self, x, y, dy):
        x = np.asarray(x, dtype=float)
        if x[0] > x[-1]:
            x, y, dy = x[::-1], y[::-1], dy[::-1]
        self.x = x
        self.y = np.asarray(y, dtype=float)
        self.dy = np.asarray(dy, dtype=float)

    def __call__(self, xq):
        xq = np.asarray(xq, dtype=float)
        scalar = xq.ndim == 0
        q = np.atleast_1d(xq)
        i = np.clip(np.searchsorted(self.x, q) - 1, 0, len(self.x) - 2)
        h = self.x[i + 1] - self.x[i]
        s = (q - self.x[i]) / h
        s2 = s * s
        s3 = s2 * s
        h00 = 2.0 * s3 - 3.0 * s2 + 1.0
        h10 = s3 - 2.0 * s2 + s
        h01 = -2.0 * s3 + 3.0 * s2
        h11 = s3 - s2
        out = (h00 * self.y[i] + h10 * h * self.dy[i]
               + h01 * self.y[i + 1] + h11 * h * self.dy[i + 1])
        return float(out[0]) if scalar else out

    def derivative(self, xq):
        xq = np.asarray(xq, dtype=float)
        scalar = xq.ndim == 0
        q = np.atleast_1d(xq)
        i = np.clip(np.searchsorted(self.x, q) - 1, 0, len(self.x) - 2)
        h = self.x[i + 1] - self.x[i]
        s = (q - self.x[i]) / h
        s2 = s * s
        d00 = (6.0 * s2 - 6.0 * s) / h
        d10 = 3.0 * s2 - 4.0 * s + 1.0
        d01 = (-6.0 * s2 + 6.0 * s) / h
        d11 = 3.0 * s2 - 2.0 * s
        out = (d00 * self.y[i] + d10 * self.dy[i]
               + d01 * self.y[i + 1] + d11 * self.dy[i + 1])
        return float(out[0]) if scalar else out
