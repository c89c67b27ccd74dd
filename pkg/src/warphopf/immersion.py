"""Discretized immersed spheres and their per-node shape fields.

A surface is sampled on two stereographic parameter lattices ("north" and
"south", glued by w = 1/z) so that no chart ever sees a pole.  Each chart is
an n x n lattice covering the square of half-width rho_chart > 1; nodes with
|z| <= 1 are "owned" by their chart, which partitions the sphere up to the
equatorial circle.  Derivatives use the 4th-order stencils of `_stencil`,
so a band of width two around each lattice edge is NaN and every derived
field inherits its own validity mask.

The per-node shape data (`ShapeField`) holds the conformal factor alpha, the
normal (Euclidean components of the F-unit normal), mean/Gauss/principal
curvatures, the radial angle function nu, the ambient tangent-plane
curvature, and two umbilicity fields:

* ``P``    - the raw quadratic-differential coefficient <nabla_{X_z} X_z, N>_F,
             only meaningful on conformal charts;
* ``q``    - the trace-free part of the second fundamental form expressed in
             an orthonormal tangent frame, |q| = (kappa1 - kappa2)/2.  On a
             conformal chart q equals 2P/alpha exactly; on general charts it
             is the chart-free substitute whose zeros and winding numbers
             are still meaningful.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import ambient as amb
from ._stencil import d1, d2, laplacian

__all__ = [
    "SurfaceSpec",
    "Chart",
    "ImmersionGrid",
    "ChartFields",
    "ShapeField",
    "build_surface",
    "conformality_defect",
    "complex_derivative",
    "shape_field",
    "real_sph_harm",
]

_SH_COEFF = {
    (0, 0): 0.28209479177387814,
    (1, -1): 0.4886025119029199,
    (1, 0): 0.4886025119029199,
    (1, 1): 0.4886025119029199,
    (2, -2): 1.0925484305920792,
    (2, -1): 1.0925484305920792,
    (2, 0): 0.31539156525252005,
    (2, 1): 1.0925484305920792,
    (2, 2): 0.5462742152960396,
}


def real_sph_harm(l: int, m: int, omega):
    """Real orthonormal spherical harmonic of degree l <= 2 on unit directions."""
    if (l, m) not in _SH_COEFF:
        raise ValueError(f"supported modes are l <= 2, got (l, m) = ({l}, {m})")
    c = _SH_COEFF[(l, m)]
    x, y, z = omega[..., 0], omega[..., 1], omega[..., 2]
    if (l, m) == (0, 0):
        return c * np.ones_like(x)
    if l == 1:
        return c * {-1: y, 0: z, 1: x}[m]
    if m == -2:
        return c * x * y
    if m == -1:
        return c * y * z
    if m == 0:
        return c * (3.0 * z * z - 1.0)
    if m == 1:
        return c * z * x
    return c * (x * x - y * y)


def _parse_mode(mode):
    if isinstance(mode, str):
        s = mode.upper().lstrip("Y")
        if len(s) < 2:
            raise ValueError(f"cannot parse harmonic mode {mode!r}")
        l = int(s[0])
        m = int(s[1:])
        return l, m
    l, m = mode
    return int(l), int(m)


@dataclass(frozen=True)
class SurfaceSpec:
    """Catalog entry describing how to place a topological sphere in the ambient."""

    kind: str
    params: dict = field(default_factory=dict)

    @staticmethod
    def slice_at(t0: float) -> "SurfaceSpec":
        """Level set of the warped coordinate: the round sphere r = r(t0)."""
        return SurfaceSpec("slice", {"t0": float(t0)})

    @staticmethod
    def euclidean_sphere(center, radius: float) -> "SurfaceSpec":
        return SurfaceSpec("euclidean_sphere",
                           {"center": tuple(float(c) for c in center),
                            "R": float(radius)})

    @staticmethod
    def graph(fn: Callable) -> "SurfaceSpec":
        """Radial graph: direction omega goes to the point at t = fn(omega)."""
        return SurfaceSpec("graph", {"fn": fn})

    @staticmethod
    def perturbed_slice(t0: float, eps: float, mode) -> "SurfaceSpec":
        l, m = _parse_mode(mode)
        return SurfaceSpec("perturbed_slice",
                           {"t0": float(t0), "eps": float(eps), "mode": (l, m)})

    @staticmethod
    def ellipsoid(semiaxes) -> "SurfaceSpec":
        a, b, c = (float(s) for s in semiaxes)
        return SurfaceSpec("ellipsoid", {"semiaxes": (a, b, c)})

    @property
    def conformal(self) -> bool:
        # Stereographic charts of centered and translated Euclidean spheres
        # stay conformal; radial graphs and stretched spheres do not.
        return self.kind in ("slice", "euclidean_sphere")


@dataclass
class Chart:
    name: str
    z: np.ndarray          # (n, n) complex lattice, z[i, j] = u_i + i v_j
    omega: np.ndarray      # (n, n, 3) unit directions of the base sphere map
    X: np.ndarray          # (n, n, 3) immersion in Euclidean coordinates
    spacing: float
    rho: float

    @property
    def own(self):
        return np.abs(self.z) <= 1.0


@dataclass
class ImmersionGrid:
    charts: dict
    conformal: bool
    n: int
    rho: float
    spacing: float
    surface: SurfaceSpec


def _sphere_map(z, chart_name):
    """Unit sphere from a stereographic parameter; north and south glue by w = 1/z."""
    x = z.real
    y = z.imag
    s = x * x + y * y
    denom = 1.0 + s
    omega = np.empty(z.shape + (3,))
    if chart_name == "north":
        omega[..., 0] = 2.0 * x / denom
        omega[..., 1] = 2.0 * y / denom
        omega[..., 2] = (1.0 - s) / denom
    else:
        omega[..., 0] = 2.0 * x / denom
        omega[..., 1] = -2.0 * y / denom
        omega[..., 2] = (s - 1.0) / denom
    return omega


def build_surface(spec: SurfaceSpec, factor: amb.RadialConformalFactor, n: int,
                  rho_chart: float = 1.2) -> ImmersionGrid:
    """Sample the catalog surface on both charts and validate the annulus."""
    if n < 8:
        raise ValueError("grid size too small for 4th-order stencils")
    axis = np.linspace(-rho_chart, rho_chart, n)
    spacing = axis[1] - axis[0]
    charts = {}
    for name in ("north", "south"):
        z = axis[:, None] + 1j * axis[None, :]
        omega = _sphere_map(z, name)
        X = _place(spec, factor, omega)
        charts[name] = Chart(name=name, z=z, omega=omega, X=X,
                             spacing=spacing, rho=rho_chart)
    grid = ImmersionGrid(charts=charts, conformal=spec.conformal, n=n,
                         rho=rho_chart, spacing=spacing, surface=spec)
    _validate_annulus(grid, factor)
    return grid


def _place(spec, factor, omega):
    if spec.kind == "slice":
        r0 = float(np.asarray(factor.G_inv(spec.params["t0"])))
        return r0 * omega
    if spec.kind == "euclidean_sphere":
        c = np.asarray(spec.params["center"], dtype=float)
        return c + spec.params["R"] * omega
    if spec.kind == "graph":
        t = np.asarray(spec.params["fn"](omega), dtype=float)
        return factor.G_inv(t)[..., None] * omega
    if spec.kind == "perturbed_slice":
        l, m = spec.params["mode"]
        t = spec.params["t0"] + spec.params["eps"] * real_sph_harm(l, m, omega)
        return factor.G_inv(t)[..., None] * omega
    if spec.kind == "ellipsoid":
        return omega * np.asarray(spec.params["semiaxes"], dtype=float)
    raise ValueError(f"unknown surface kind {spec.kind!r}")


def _validate_annulus(grid, factor):
    r0, r1 = factor.annulus
    tol = 1e-12
    for name, chart in grid.charts.items():
        r = np.linalg.norm(chart.X, axis=-1)
        bad = (r < r0 - tol) | (r > r1 + tol)
        if np.any(bad):
            i, j = np.argwhere(bad)[0]
            raise ValueError(
                f"surface leaves the ambient annulus {factor.annulus}: "
                f"chart {name}, node ({i}, {j}), |X| = {r[i, j]:.6g}")


def complex_derivative(fld, spacing):
    """(d/dz, d/dzbar) of a lattice field, 4th-order interior stencils."""
    fu = d1(fld, spacing, 0)
    fv = d1(fld, spacing, 1)
    return 0.5 * (fu - 1j * fv), 0.5 * (fu + 1j * fv)


def conformality_defect(grid: ImmersionGrid):
    """Beltrami coefficient mu per chart, from the Euclidean induced metric.

    mu = (E - G + 2iF)/(4 lambda) with lambda = (E + G + 2 sqrt(EG - F^2))/4;
    a common conformal rescaling of the ambient cancels, so mu needs no
    ambient data.  |mu| < 1 wherever the immersion is regular; degenerate
    nodes (EG - F^2 <= 0) come back as NaN.
    """
    out = {}
    with np.errstate(invalid="ignore", divide="ignore"):
        for name, chart in grid.charts.items():
            xu = d1(chart.X, chart.spacing, 0)
            xv = d1(chart.X, chart.spacing, 1)
            e = np.sum(xu * xu, axis=-1)
            f = np.sum(xu * xv, axis=-1)
            g = np.sum(xv * xv, axis=-1)
            w = e * g - f * f
            w = np.where(w > 0.0, w, np.nan)
            lam = 0.25 * (e + g + 2.0 * np.sqrt(w))
            out[name] = (e - g + 2.0j * f) / (4.0 * lam)
    return out


@dataclass
class ChartFields:
    """Per-node geometric quantities on one chart (NaN outside validity)."""

    name: str
    z: np.ndarray
    X: np.ndarray
    spacing: float
    own: np.ndarray
    F: np.ndarray            # conformal factor u(|X|)
    du: np.ndarray
    ddu: np.ndarray
    r: np.ndarray
    t: np.ndarray
    X_u: np.ndarray
    X_v: np.ndarray
    X_z: np.ndarray
    X_zb: np.ndarray
    Em: np.ndarray           # first fundamental form w.r.t. <.,.>_F
    Fm: np.ndarray
    Gm: np.ndarray
    alpha: np.ndarray
    N: np.ndarray            # F-unit normal, Euclidean components (|N| = F)
    nu: np.ndarray
    H: np.ndarray
    K: np.ndarray
    K_ext: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    q: np.ndarray            # trace-free II in orthonormal gauge (complex)
    P: Optional[np.ndarray]  # <nabla_{X_z} X_z, N>_F on conformal charts
    cov_zz: np.ndarray
    cov_zzb: np.ndarray
    KbarT: np.ndarray


@dataclass
class ShapeField:
    grid: ImmersionGrid
    factor: amb.RadialConformalFactor
    charts: dict
    flipped: bool

    def chart(self, name) -> ChartFields:
        return self.charts[name]


def _dot3(a, b):
    return np.sum(a * b, axis=-1)


def _gamma_pair(gamma, a, b):
    return np.einsum("...kij,...i,...j->...k", gamma, a, b)


def _brioschi(em, fm, gm, sp):
    e_u, e_v = d1(em, sp, 0), d1(em, sp, 1)
    g_u, g_v = d1(gm, sp, 0), d1(gm, sp, 1)
    f_u, f_v = d1(fm, sp, 0), d1(fm, sp, 1)
    e_vv = d2(em, sp, 1)
    g_uu = d2(gm, sp, 0)
    f_uv = d1(d1(fm, sp, 0), sp, 1)

    def det3(a11, a12, a13, a21, a22, a23, a31, a32, a33):
        return (a11 * (a22 * a33 - a23 * a32)
                - a12 * (a21 * a33 - a23 * a31)
                + a13 * (a21 * a32 - a22 * a31))

    m1 = det3(-0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v,
              f_v - 0.5 * g_u, em, fm,
              0.5 * g_v, fm, gm)
    m2 = det3(np.zeros_like(em), 0.5 * e_v, 0.5 * g_u,
              0.5 * e_v, em, fm,
              0.5 * g_u, fm, gm)
    w = em * gm - fm * fm
    return (m1 - m2) / (w * w)


def _compute_chart(chart: Chart, factor: amb.RadialConformalFactor, conformal: bool) -> ChartFields:
    with np.errstate(invalid="ignore", divide="ignore"):
        return _compute_chart_inner(chart, factor, conformal)


def _compute_chart_inner(chart, factor, conformal):
    sp = chart.spacing
    X = chart.X
    r = np.linalg.norm(X, axis=-1)
    u, du, ddu = factor.eval(r)
    t = np.asarray(factor.G(r))

    xu = d1(X, sp, 0)
    xv = d1(X, sp, 1)
    xuu = d2(X, sp, 0)
    xvv = d2(X, sp, 1)
    xuv = d1(xu, sp, 1)

    f2 = u * u
    em = _dot3(xu, xu) / f2
    fm = _dot3(xu, xv) / f2
    gm = _dot3(xv, xv) / f2
    alpha = 0.5 * (em + gm)
    w = em * gm - fm * fm

    cr = np.cross(xu, xv)
    cr_norm = np.linalg.norm(cr, axis=-1)
    n_vec = cr / cr_norm[..., None] * u[..., None]     # Euclidean length F -> F-unit
    nu = _dot3(X, n_vec) / (r * u)

    gamma = amb.christoffel(factor, X)
    cov_uu = xuu + _gamma_pair(gamma, xu, xu)
    cov_uv = xuv + _gamma_pair(gamma, xu, xv)
    cov_vv = xvv + _gamma_pair(gamma, xv, xv)
    l_ = _dot3(cov_uu, n_vec) / f2
    m_ = _dot3(cov_uv, n_vec) / f2
    n_ = _dot3(cov_vv, n_vec) / f2

    h = (l_ * gm - 2.0 * m_ * fm + n_ * em) / (2.0 * w)
    k_ext = (l_ * n_ - m_ * m_) / w
    disc = np.sqrt(np.maximum(h * h - k_ext, 0.0))
    kappa1 = h + disc
    kappa2 = h - disc

    # trace-free II in the Gram-Schmidt tangent frame (= 2P/alpha if conformal)
    ii11 = l_ / em
    ii12 = (m_ - fm * l_ / em) / np.sqrt(w)
    ii22 = (n_ - 2.0 * fm * m_ / em + (fm / em) ** 2 * l_) / (w / em)
    q = 0.5 * (ii11 - ii22) - 1j * ii12

    x_z = 0.5 * (xu - 1j * xv)
    x_zb = 0.5 * (xu + 1j * xv)
    x_zz = 0.25 * (xuu - xvv) - 0.5j * xuv
    x_zzb = 0.25 * (xuu + xvv)
    cov_zz = x_zz + _gamma_pair(gamma, x_z, x_z)
    cov_zzb = x_zzb + _gamma_pair(gamma, x_zb, x_z)

    p = _dot3(cov_zz, n_vec.astype(complex)) / f2 if conformal else None

    if conformal:
        k_gauss = -laplacian(np.log(alpha), sp) / (2.0 * alpha)
    else:
        k_gauss = _brioschi(em, fm, gm, sp)

    kbar = amb.sectional(factor, X, xu, xv)

    return ChartFields(
        name=chart.name, z=chart.z, X=X, spacing=sp, own=chart.own,
        F=u, du=du, ddu=ddu, r=r, t=t,
        X_u=xu, X_v=xv, X_z=x_z, X_zb=x_zb,
        Em=em, Fm=fm, Gm=gm, alpha=alpha,
        N=n_vec, nu=nu, H=h, K=k_gauss, K_ext=k_ext,
        kappa1=kappa1, kappa2=kappa2, q=q, P=p,
        cov_zz=cov_zz, cov_zzb=cov_zzb, KbarT=kbar)


def _flip_orientation(cf: ChartFields):
    cf.N = -cf.N
    cf.nu = -cf.nu
    cf.H = -cf.H
    cf.kappa1, cf.kappa2 = -cf.kappa2, -cf.kappa1
    cf.q = -cf.q
    if cf.P is not None:
        cf.P = -cf.P


def shape_field(grid: ImmersionGrid, factor: amb.RadialConformalFactor,
                threads: int = 1) -> ShapeField:
    """Compute all per-node shape quantities on both charts.

    The normal is oriented so that the angle function nu is nonnegative on
    average (pointing toward increasing t); both charts share one geometric
    normal field, so a single global flip suffices.
    """
    names = list(grid.charts)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(names))) as ex:
            results = list(ex.map(
                lambda nm: _compute_chart(grid.charts[nm], factor, grid.conformal), names))
    else:
        results = [_compute_chart(grid.charts[nm], factor, grid.conformal) for nm in names]
    charts = dict(zip(names, results))

    total = 0.0
    count = 0
    for cf in charts.values():
        sel = cf.own & np.isfinite(cf.nu)
        total += float(np.sum(cf.nu[sel]))
        count += int(np.sum(sel))
    flipped = count > 0 and total < 0.0
    if flipped:
        for cf in charts.values():
            _flip_orientation(cf)
    return ShapeField(grid=grid, factor=factor, charts=charts, flipped=flipped)


def chart_consistency(sf: ShapeField, field_name: str, band=(0.85, 1.0), spline_order=5):
    """Max disagreement of a chart-independent scalar across the chart overlap.

    Samples the south-chart field at the images w = 1/z of north nodes in the
    given |z| band through a high-order spline, so the comparison error is
    dominated by the fields themselves, not by the resampling.
    """
    from scipy.interpolate import RectBivariateSpline

    north = sf.chart("north")
    south = sf.chart("south")
    fld_n = getattr(north, field_name)
    fld_s = getattr(south, field_name)
    if np.iscomplexobj(fld_n):
        fld_n, fld_s = np.abs(fld_n), np.abs(fld_s)
    n = fld_s.shape[0]
    core = slice(4, n - 4)
    axis = south.z[:, 0].real
    block = fld_s[core, core]
    if not np.all(np.isfinite(block)):
        raise ValueError(f"field {field_name} has invalid nodes inside the spline block")
    spl = RectBivariateSpline(axis[core], axis[core], block, kx=spline_order, ky=spline_order)
    az = np.abs(north.z)
    sel = (az >= band[0]) & (az <= band[1]) & np.isfinite(fld_n)
    w = 1.0 / north.z[sel]
    ref = spl.ev(w.real, w.imag)
    return float(np.max(np.abs(fld_n[sel] - ref)))
