"""Fourth-order central finite differences on square chart lattices.

Fields live on (n, n, ...) arrays indexed [i, j] = (u_i, v_j).  Stencils fill
a boundary band of width 2 with NaN instead of switching to one-sided
formulas; NaNs then propagate through derived fields, so every quantity
carries its own validity mask implicitly and convergence-order measurements
stay clean.
"""

import numpy as np

C1 = (1.0, -8.0, 8.0, -1.0)     # f(-2h), f(-h), f(h), f(2h), divided by 12h
C2 = (-1.0, 16.0, -30.0, 16.0, -1.0)  # second derivative, divided by 12h^2


def _nan_like(f, dtype=None):
    out = np.empty(f.shape, dtype=dtype or f.dtype)
    out.fill(np.nan)
    return out


def d1(f, spacing, axis):
    """First derivative along axis (0 = u, 1 = v), interior 4th order."""
    f = np.asarray(f)
    out = _nan_like(f, dtype=np.result_type(f.dtype, float))
    sl = [slice(None)] * f.ndim

    def take(shift):
        s = list(sl)
        s[axis] = slice(2 + shift, f.shape[axis] - 2 + shift or None)
        return f[tuple(s)]

    interior = list(sl)
    interior[axis] = slice(2, -2)
    out[tuple(interior)] = (take(-2) - 8.0 * take(-1) + 8.0 * take(1) - take(2)) / (12.0 * spacing)
    return out


def d2(f, spacing, axis):
    """Second derivative along axis, interior 4th order."""
    f = np.asarray(f)
    out = _nan_like(f, dtype=np.result_type(f.dtype, float))
    sl = [slice(None)] * f.ndim

    def take(shift):
        s = list(sl)
        s[axis] = slice(2 + shift, f.shape[axis] - 2 + shift or None)
        return f[tuple(s)]

    interior = list(sl)
    interior[axis] = slice(2, -2)
    out[tuple(interior)] = (-take(-2) + 16.0 * take(-1) - 30.0 * take(0)
                            + 16.0 * take(1) - take(2)) / (12.0 * spacing ** 2)
    return out


def dz(f, spacing):
    """(d/dz, d/dzbar) with z = u + iv: 1/2 (d_u -/+ i d_v)."""
    fu = d1(f, spacing, 0)
    fv = d1(f, spacing, 1)
    return 0.5 * (fu - 1j * fv), 0.5 * (fu + 1j * fv)


def second_z(f, spacing):
    """(f_zz, f_zzbar, f_zbzb) assembled from one-pass second-derivative stencils."""
    fuu = d2(f, spacing, 0)
    fvv = d2(f, spacing, 1)
    fuv = d1(d1(f, spacing, 0), spacing, 1)
    f_zz = 0.25 * (fuu - fvv) - 0.5j * fuv
    f_zzb = 0.25 * (fuu + fvv)
    f_zbzb = 0.25 * (fuu - fvv) + 0.5j * fuv
    return f_zz, f_zzb, f_zbzb


def laplacian(f, spacing):
    return d2(f, spacing, 0) + d2(f, spacing, 1)
