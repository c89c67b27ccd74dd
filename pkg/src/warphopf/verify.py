"""Residual evaluation of the structural identities of immersed spheres.

Every identity is checked pointwise as |LHS - RHS| assembled purely from
`ambient` / `immersion` primitives plus lattice derivatives, so residuals
measure discretization error.  The catalog:

    I1  frame equations: nabla_{X_zb} X_z = (alpha H / 2) N and
        nabla_{X_z} N = -H X_z - (2P/alpha) X_zb
    I2  |2P/alpha|^2 = H^2 - K + Kbar(T)
    I3  P_zb = (alpha/2) H_z + <R(X_zb, X_z) X_z, N>_F
    I4  <R(X_zb, X_z) X_z, N>_F = -(alpha / 2F) Hess F(X_z, N)
    I5  (4 / (alpha F^2)) r_z r_zb + nu^2 = 1
    I6  Kbar(T) = -|grad F|^2 + (4 / (alpha F)) Hess F(X_z, X_zb)
    I7  u' = (1 - h')/h   and   u'' u = -h''/h - (1 - h') h'/h^2
    I8  Hess F(X_z, N/F) = -(K_tan - K_rad) nu t_z
    I9  P_zb = (alpha/2) [H_z + (K_tan - K_rad) nu t_z]
    I10 K_tan - (1 - nu^2)(K_tan - K_rad) equals the closed radicand form of
        the mass/charge profiles (surface-free, pure profile algebra)

plus the pointwise differential inequality evaluator (`et_test`), the
slice/umbilicity classifier, and Poincare-index bookkeeping for the zeros of
the Hopf field (`hopf_zero_indices`).
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import RectBivariateSpline

from . import ambient as amb
from ._stencil import d1
from .immersion import ImmersionGrid, ShapeField, shape_field
from .warp import WarpingModel, curvatures

__all__ = [
    "IDENTITY_IDS",
    "CONFORMAL_ONLY",
    "UnsupportedChartError",
    "ResidualReport",
    "ETReport",
    "Verdict",
    "ZeroIndexReport",
    "evaluate_identity",
    "et_test",
    "classify",
    "hopf_zero_indices",
]

IDENTITY_IDS = tuple(f"I{k}" for k in range(1, 11))
CONFORMAL_ONLY = frozenset({"I1", "I2", "I3", "I4", "I5", "I6", "I8", "I9"})


class UnsupportedChartError(ValueError):
    """A conformal-chart-only identity was requested on a general chart."""


@dataclass
class ResidualReport:
    id: str
    max_residual: float
    rms_residual: float
    scale: float
    node_count: int
    grid_step: float
    convergence_order: Optional[float] = None

    def to_json(self):
        return {
            "id": self.id,
            "max_residual": self.max_residual,
            "rms_residual": self.rms_residual,
            "scale": self.scale,
            "node_count": self.node_count,
            "grid_step": self.grid_step,
            "convergence_order": self.convergence_order,
        }


@dataclass
class ETReport:
    """Pointwise bound data: LHS, radicand and f_min fields plus their stats."""

    sup_f_min: float
    f_min_p_norm: float
    p: float
    lhs_max: float
    radicand_min: float
    umbilic_area_fraction: float
    node_count: int
    fields: dict = field(repr=False, default_factory=dict)

    def to_json(self):
        return {
            "sup_f_min": self.sup_f_min,
            "f_min_p_norm": self.f_min_p_norm,
            "p": self.p,
            "lhs_max": self.lhs_max,
            "radicand_min": self.radicand_min,
            "umbilic_area_fraction": self.umbilic_area_fraction,
            "node_count": self.node_count,
        }


@dataclass
class Verdict:
    umbilic: bool
    cmc: bool
    slice: bool
    D1_fraction: float
    D2_fraction: float
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "umbilic": self.umbilic,
            "cmc": self.cmc,
            "slice": self.slice,
            "D1_fraction": self.D1_fraction,
            "D2_fraction": self.D2_fraction,
        }


@dataclass
class ZeroIndexReport:
    degenerate: bool
    zeros: list
    unresolved: list
    line_index_sum: float

    def to_json(self):
        return {
            "degenerate": self.degenerate,
            "zeros": self.zeros,
            "unresolved": self.unresolved,
            "line_index_sum": self.line_index_sum,
        }


# ---------------------------------------------------------------------------
# residual assembly helpers

def _fnorm(vec, f):
    """Magnitude of a (possibly complex) coordinate vector in the F-metric."""
    return np.sqrt(np.sum(np.abs(vec) ** 2, axis=-1)) / f


def _inner_f(a, b, f):
    """Bilinear (unconjugated) F-inner product of coordinate vectors."""
    return np.sum(a * b, axis=-1) / (f * f)


def _stats(res_by_chart, sf, scale):
    """(max, rms, count) over owned, finite residual nodes; deterministic."""
    max_abs = 0.0
    total = []
    count = 0
    for name in sf.charts:
        cf = sf.chart(name)
        res = res_by_chart[name]
        sel = cf.own & np.isfinite(res)
        vals = np.abs(res[sel])
        if vals.size:
            max_abs = max(max_abs, float(np.max(vals)))
            total.append(math.fsum((vals * vals).tolist()))
            count += vals.size
    rms = math.sqrt(math.fsum(total) / count) if count else 0.0
    return max_abs, rms, count


def _curv_term(sf, factor, name):
    """<R(X_zb, X_z) X_z, N>_F, the curvature source of the Hopf derivative."""
    cf = sf.chart(name)
    rv = amb.riemann(factor, cf.X, cf.X_zb, cf.X_z, cf.X_z)
    return _inner_f(rv, cf.N.astype(complex), cf.F)


def _i1(sf, factor, model):
    out, scale = {}, 0.0
    for name in sf.charts:
        cf = sf.chart(name)
        rhs = (0.5 * cf.alpha * cf.H)[..., None] * cf.N
        res_a = _fnorm(cf.cov_zzb - rhs, cf.F)
        n_z, _ = _dz_field(cf.N, cf.spacing)
        gamma = amb.christoffel(factor, cf.X)
        nab_n = n_z + np.einsum("...kij,...i,...j->...k", gamma, cf.X_z, cf.N.astype(complex))
        res_b = _fnorm(nab_n + cf.H[..., None] * cf.X_z
                       + (2.0 * cf.P / cf.alpha)[..., None] * cf.X_zb, cf.F)
        out[name] = np.fmax(res_a, res_b)
        scale = max(scale, _nanmax_own(np.abs(0.5 * cf.alpha * cf.H), cf))
    return out, scale


def _i2(sf, factor, model):
    out, scale = {}, 0.0
    for name in sf.charts:
        cf = sf.chart(name)
        lhs = np.abs(2.0 * cf.P / cf.alpha) ** 2
        rhs = cf.H ** 2 - cf.K + cf.KbarT
        out[name] = np.abs(lhs - rhs)
        scale = max(scale, _nanmax_own(np.abs(rhs), cf), _nanmax_own(lhs, cf))
    return out, scale


def _i3(sf, factor, model):
    out, scale = {}, 0.0
    for name in sf.charts:
        cf = sf.chart(name)
        _, p_zb = _dz_field(cf.P, cf.spacing)
        h_z, _ = _dz_field(cf.H, cf.spacing)
        curv = _curv_term(sf, factor, name)
        out[name] = np.abs(p_zb - 0.5 * cf.alpha * h_z - curv)
        scale = max(scale, _nanmax_own(np.abs(0.5 * cf.alpha * h_z), cf),
                    _nanmax_own(np.abs(curv), cf))
    return out, scale


def _i4(sf, factor, model):
    out, scale = {}, 0.0
    for name in sf.charts:
        cf = sf.chart(name)
        lhs = _curv_term(sf, factor, name)
        hess = amb.hess_radial(factor, cf.X, cf.X_z, cf.N.astype(complex))
        rhs = -(0.5 * cf.alpha / cf.F) * hess
        out[name] = np.abs(lhs - rhs)
        scale = max(scale, _nanmax_own(np.abs(rhs), cf), _nanmax_own(np.abs(lhs), cf))
    return out, scale


def _i5(sf, factor, model):
    out = {}
    for name in sf.charts:
        cf = sf.chart(name)
        r_z, r_zb = _dz_field(cf.r, cf.spacing)
        lhs = 4.0 / (cf.alpha * cf.F ** 2) * r_z * r_zb + cf.nu ** 2
        out[name] = np.abs(lhs - 1.0)
    return out, 1.0


def _i6(sf, factor, model):
    out, scale = {}, 0.0
    for name in sf.charts:
        cf = sf.chart(name)
        hess = amb.hess_radial(factor, cf.X, cf.X_z, cf.X_zb)
        lhs = -cf.du ** 2 + (4.0 / (cf.alpha * cf.F)) * hess
        out[name] = np.abs(lhs - cf.KbarT)
        scale = max(scale, _nanmax_own(np.abs(cf.KbarT), cf), 1e-30)
    return out, scale


def _i7(sf, factor, model):
    out, scale = {}, 0.0
    for name in sf.charts:
        cf = sf.chart(name)
        h, hp, hpp = model.eval(np.clip(cf.t, model.t_min, model.t_max))
        res1 = np.abs(cf.du - (1.0 - hp) / h)
        res2 = np.abs(cf.ddu * cf.F - (-hpp / h - (1.0 - hp) * hp / (h * h)))
        out[name] = np.fmax(res1, res2)
        scale = max(scale, _nanmax_own(np.abs((1.0 - hp) / h), cf), 1e-30)
    return out, scale


def _i8(sf, factor, model):
    out, scale = {}, 0.0
    for name in sf.charts:
        cf = sf.chart(name)
        kt, kr = curvatures(model, np.clip(cf.t, model.t_min, model.t_max))
        t_z, _ = _dz_field(cf.t, cf.spacing)
        n_unit = (cf.N / cf.F[..., None]).astype(complex)
        lhs = amb.hess_radial(factor, cf.X, cf.X_z, n_unit)
        rhs = -(kt - kr) * cf.nu * t_z
        out[name] = np.abs(lhs - rhs)
        scale = max(scale, _nanmax_own(np.abs(rhs), cf), _nanmax_own(np.abs(lhs), cf), 1e-30)
    return out, scale


def _i9(sf, factor, model):
    out, scale = {}, 0.0
    for name in sf.charts:
        cf = sf.chart(name)
        kt, kr = curvatures(model, np.clip(cf.t, model.t_min, model.t_max))
        _, p_zb = _dz_field(cf.P, cf.spacing)
        h_z, _ = _dz_field(cf.H, cf.spacing)
        t_z, _ = _dz_field(cf.t, cf.spacing)
        rhs = 0.5 * cf.alpha * (h_z + (kt - kr) * cf.nu * t_z)
        out[name] = np.abs(p_zb - rhs)
        scale = max(scale, _nanmax_own(np.abs(rhs), cf), 1e-30)
    return out, scale


def _dz_field(fld, spacing):
    fu = d1(fld, spacing, 0)
    fv = d1(fld, spacing, 1)
    return 0.5 * (fu - 1j * fv), 0.5 * (fu + 1j * fv)


def _nanmax_own(fld, cf):
    sel = cf.own & np.isfinite(fld)
    return float(np.max(fld[sel])) if np.any(sel) else 0.0


_EVALUATORS = {
    "I1": _i1, "I2": _i2, "I3": _i3, "I4": _i4, "I5": _i5,
    "I6": _i6, "I7": _i7, "I8": _i8, "I9": _i9,
}


def _i10_report(model: WarpingModel, n_t=100, n_nu=21):
    if model.kind not in ("dss", "rn"):
        raise ValueError("the radicand identity is specific to the mass/charge profiles")
    span = model.t_max - model.t_min
    t = np.linspace(model.t_min + 1e-3 * span, model.t_max - 1e-3 * span, n_t)
    nu = np.linspace(-1.0, 1.0, n_nu)[:, None]
    kt, kr = curvatures(model, t)
    h = model.eval(t)[0]
    lhs = kt - (1.0 - nu ** 2) * (kt - kr)
    if model.kind == "dss":
        m, c = model.params["m"], model.params["c"]
        rhs = c + m * (3.0 * nu ** 2 - 1.0) / (2.0 * h ** 3)
    else:
        m, q = model.params["m"], model.params["q"]
        rhs = (m * (3.0 * nu ** 2 - 1.0) / (2.0 * h ** 3)
               + q * q * (1.0 - 2.0 * nu ** 2) / h ** 4)
    res = np.abs(lhs - rhs)
    rms = math.sqrt(math.fsum((res * res).ravel().tolist()) / res.size)
    return ResidualReport(id="I10", max_residual=float(res.max()), rms_residual=rms,
                          scale=float(np.abs(rhs).max()), node_count=res.size,
                          grid_step=0.0)


def evaluate_identity(grid: Optional[ImmersionGrid], factor, model: WarpingModel,
                      ident: str, shape: Optional[ShapeField] = None,
                      threads: int = 1) -> ResidualReport:
    """Evaluate one catalog identity as a pointwise residual field.

    Conformal-chart-only identities raise `UnsupportedChartError` on general
    charts instead of silently skipping.  "I10" needs no surface at all.
    """
    if ident == "I10":
        return _i10_report(model)
    if ident not in _EVALUATORS:
        raise ValueError(f"unknown identity id {ident!r}")
    if grid is None:
        raise ValueError(f"identity {ident} needs a surface grid")
    if ident in CONFORMAL_ONLY and not grid.conformal:
        raise UnsupportedChartError(
            f"identity {ident} is defined on conformal charts; "
            f"surface kind {grid.surface.kind!r} is not conformal")
    sf = shape if shape is not None else shape_field(grid, factor, threads=threads)
    with np.errstate(invalid="ignore", divide="ignore"):
        res, scale = _EVALUATORS[ident](sf, factor, model)
    max_abs, rms, count = _stats(res, sf, scale)
    return ResidualReport(id=ident, max_residual=max_abs, rms_residual=rms,
                          scale=scale, node_count=count, grid_step=grid.spacing)


# ---------------------------------------------------------------------------
# pointwise differential inequality

def _grad_norm2(cf, fu, fv):
    """Squared norm of a 1-form with chart components (fu, fv) w.r.t. the induced metric."""
    w = cf.Em * cf.Gm - cf.Fm ** 2
    return (cf.Gm * fu * fu - 2.0 * cf.Fm * fu * fv + cf.Em * fv * fv) / w


def et_test(grid: ImmersionGrid, factor, model: WarpingModel,
            shape: Optional[ShapeField] = None, p: float = 4.0,
            rad_floor: float = 1e-12, umbilic_tol: float = 1e-5,
            threads: int = 1) -> ETReport:
    """Evaluate |dH + (K_tan - K_rad) nu dt| against sqrt(radicand) pointwise.

    radicand = H^2 - K + K_tan - (1 - nu^2)(K_tan - K_rad); the quotient
    f_min = LHS / sqrt(radicand) is the smallest admissible bound function.
    Nodes that are umbilic at grid precision (principal-curvature half-spread
    |q| below the scale-aware umbilicity tolerance, or radicand below
    rad_floor) make the bound vacuous and are excluded from sup and the
    p-norm; an umbilic grid therefore reports f_min identically zero.
    """
    sf = shape if shape is not None else shape_field(grid, factor, threads=threads)
    h_abs = 0.0
    for name in sf.charts:
        cf = sf.chart(name)
        h_abs = max(h_abs, _nanmax_own(np.abs(cf.H), cf))
    spread_floor = umbilic_tol * (1.0 + h_abs)
    sup_f = 0.0
    lhs_max = 0.0
    rad_min = math.inf
    pow_terms = []
    umb_area = 0.0
    tot_area = 0.0
    count = 0
    fields = {}
    with np.errstate(invalid="ignore", divide="ignore"):
        for name in sf.charts:
            cf = sf.chart(name)
            kt, kr = curvatures(model, np.clip(cf.t, model.t_min, model.t_max))
            coeff = (kt - kr) * cf.nu
            h_u = d1(cf.H, cf.spacing, 0)
            h_v = d1(cf.H, cf.spacing, 1)
            t_u = d1(cf.t, cf.spacing, 0)
            t_v = d1(cf.t, cf.spacing, 1)
            lhs = np.sqrt(np.maximum(
                _grad_norm2(cf, h_u + coeff * t_u, h_v + coeff * t_v), 0.0))
            radicand = cf.H ** 2 - cf.K + kt - (1.0 - cf.nu ** 2) * (kt - kr)
            valid = cf.own & np.isfinite(lhs) & np.isfinite(radicand)
            pos = valid & (radicand > rad_floor) & (np.abs(cf.q) > spread_floor)
            f_min = np.where(pos, lhs / np.sqrt(np.where(pos, radicand, 1.0)), np.nan)
            area = np.sqrt(np.maximum(cf.Em * cf.Gm - cf.Fm ** 2, 0.0)) * cf.spacing ** 2
            fields[name] = {"lhs": lhs, "radicand": radicand, "f_min": f_min}
            if np.any(valid):
                lhs_max = max(lhs_max, float(np.max(lhs[valid])))
                rad_min = min(rad_min, float(np.min(radicand[valid])))
                tot_area += math.fsum(area[valid].tolist())
                umb_area += math.fsum(area[valid & ~pos].tolist())
                count += int(np.sum(valid))
            if np.any(pos):
                sup_f = max(sup_f, float(np.max(f_min[pos])))
                pow_terms.append(math.fsum((f_min[pos] ** p * area[pos]).tolist()))
    norm_p = math.fsum(pow_terms) ** (1.0 / p) if pow_terms else 0.0
    return ETReport(sup_f_min=sup_f, f_min_p_norm=norm_p, p=p, lhs_max=lhs_max,
                    radicand_min=rad_min if math.isfinite(rad_min) else 0.0,
                    umbilic_area_fraction=umb_area / tot_area if tot_area else 0.0,
                    node_count=count, fields=fields)


# ---------------------------------------------------------------------------
# classification

def classify(grid: ImmersionGrid, factor, model: WarpingModel,
             tol: Optional[float] = None, shape: Optional[ShapeField] = None,
             threads: int = 1) -> Verdict:
    """Umbilic / constant-mean-curvature / slice verdicts with measured margins.

    tol defaults to 1e-5 scaled by (1 + max |H|); umbilicity compares the
    principal-curvature half-spread |q| against it, cmc compares the spread
    of H, and slice-hood requires |dt| ~ 0 together with nu^2 ~ 1.  D1/D2
    report the area fractions of the dichotomy sets {nu = 0} and {dt = 0}.
    """
    sf = shape if shape is not None else shape_field(grid, factor, threads=threads)
    h_max = -math.inf
    h_min = math.inf
    h_abs = 0.0
    q_max = 0.0
    dt_max = 0.0
    nu2_min = math.inf
    d1_area = 0.0
    d2_area = 0.0
    tot_area = 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        for name in sf.charts:
            cf = sf.chart(name)
            t_u = d1(cf.t, cf.spacing, 0)
            t_v = d1(cf.t, cf.spacing, 1)
            dt_norm = np.sqrt(np.maximum(_grad_norm2(cf, t_u, t_v), 0.0))
            area = np.sqrt(np.maximum(cf.Em * cf.Gm - cf.Fm ** 2, 0.0)) * cf.spacing ** 2
            sel = cf.own & np.isfinite(cf.H) & np.isfinite(dt_norm) & np.isfinite(cf.q)
            if not np.any(sel):
                continue
            h_max = max(h_max, float(np.max(cf.H[sel])))
            h_min = min(h_min, float(np.min(cf.H[sel])))
            h_abs = max(h_abs, float(np.max(np.abs(cf.H[sel]))))
            q_max = max(q_max, float(np.max(np.abs(cf.q[sel]))))
            dt_max = max(dt_max, float(np.max(dt_norm[sel])))
            nu2_min = min(nu2_min, float(np.min(cf.nu[sel] ** 2)))
            tot_area += math.fsum(area[sel].tolist())
            d1_area += math.fsum(area[sel & (np.abs(cf.nu) < 1e-2)].tolist())
            d2_area += math.fsum(area[sel & (dt_norm < 1e-5)].tolist())
    base_tol = 1e-5 if tol is None else tol
    scale = 1.0 + h_abs
    eff = base_tol * scale
    verdict = Verdict(
        umbilic=bool(q_max < eff),
        cmc=bool((h_max - h_min) < eff),
        slice=bool(dt_max < eff and nu2_min > 1.0 - eff),
        D1_fraction=d1_area / tot_area if tot_area else 0.0,
        D2_fraction=d2_area / tot_area if tot_area else 0.0,
        diagnostics={
            "kappa_half_spread_max": q_max,
            "H_spread": h_max - h_min,
            "dt_max": dt_max,
            "nu2_min": nu2_min,
            "tol_effective": eff,
        })
    return verdict


# ---------------------------------------------------------------------------
# zeros of the Hopf field and their winding indices

def _winding_on_circle(re_spl, im_spl, u0, v0, radius, n_angles):
    th = np.linspace(0.0, 2.0 * math.pi, n_angles, endpoint=False)
    us = u0 + radius * np.cos(th)
    vs = v0 + radius * np.sin(th)
    vals = re_spl.ev(us, vs) + 1j * im_spl.ev(us, vs)
    if np.any(np.abs(vals) == 0.0):
        return None
    ph = np.angle(vals)
    dph = np.diff(np.concatenate([ph, ph[:1]]))
    dph = (dph + math.pi) % (2.0 * math.pi) - math.pi
    if np.any(np.abs(dph) >= 0.5 * math.pi):
        return None
    total = float(np.sum(dph) / (2.0 * math.pi))
    w = round(total)
    if abs(total - w) > 0.05:
        return None
    return w


def hopf_zero_indices(grid: ImmersionGrid, factor,
                      shape: Optional[ShapeField] = None,
                      n_angles: int = 16, zero_rel: float = 0.1,
                      degenerate_tol: float = 1e-7,
                      threads: int = 1) -> ZeroIndexReport:
    """Locate zeros of the Hopf field and compute their winding numbers.

    Candidates are strict local minima of |q| below zero_rel times the global
    maximum, owned by the chart where |z| <= 1.  The winding of q around each
    is read off a circle of lattice-scale radius through spline samples with
    phase unwrapping; any half-turn jump rejects the radius and a larger one
    is tried.  A zero of winding w corresponds to a principal-direction line
    field index -w/2; on a sphere the resolved indices must sum to 2.

    If |q| never rises above degenerate_tol times the curvature scale the
    surface is umbilic at grid precision and the report says so instead of
    listing zeros.
    """
    sf = shape if shape is not None else shape_field(grid, factor, threads=threads)
    q_max = 0.0
    h_abs = 0.0
    for name in sf.charts:
        cf = sf.chart(name)
        q_max = max(q_max, _nanmax_own(np.abs(cf.q), cf))
        h_abs = max(h_abs, _nanmax_own(np.abs(cf.H), cf))
    if q_max < degenerate_tol * (1.0 + h_abs):
        return ZeroIndexReport(degenerate=True, zeros=[], unresolved=[], line_index_sum=0.0)

    threshold = zero_rel * q_max
    zeros = []
    unresolved = []
    for name in sf.charts:
        cf = sf.chart(name)
        aq = np.abs(cf.q)
        n = aq.shape[0]
        # strict 8-neighbour local minima of |q|, interior and owned
        c = aq[1:-1, 1:-1]
        is_min = np.ones_like(c, dtype=bool)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di == 0 and dj == 0:
                    continue
                is_min &= c < aq[1 + di:n - 1 + di, 1 + dj:n - 1 + dj]
        cand = np.zeros_like(aq, dtype=bool)
        cand[1:-1, 1:-1] = is_min & np.isfinite(c) & (c < threshold)
        cand &= np.abs(cf.z) <= 1.0
        if not np.any(cand):
            continue
        axis = cf.z[:, 0].real
        # spline over the valid interior block of the q field
        core = slice(2, n - 2)
        re_spl = RectBivariateSpline(axis[core], axis[core], cf.q.real[core, core], kx=3, ky=3)
        im_spl = RectBivariateSpline(axis[core], axis[core], cf.q.imag[core, core], kx=3, ky=3)
        sp = cf.spacing
        rho_core = axis[n - 3]
        for i, j in np.argwhere(cand):
            z0 = cf.z[i, j]
            u0, v0 = z0.real, z0.imag
            max_radius = rho_core - max(abs(u0), abs(v0)) - sp
            w = None
            radius = 4.0 * sp
            while radius <= max_radius:
                w = _winding_on_circle(re_spl, im_spl, u0, v0, radius, n_angles)
                if w is not None:
                    break
                radius *= 1.5
            entry = {
                "chart": name,
                "z_re": float(u0),
                "z_im": float(v0),
                "position": [float(x) for x in cf.X[i, j]],
                "min_abs_q": float(aq[i, j]),
            }
            if w is None:
                unresolved.append(entry)
            else:
                entry["winding"] = int(w)
                entry["line_index"] = -0.5 * w
                entry["circle_radius"] = float(radius)
                zeros.append(entry)
    # merge duplicates: keep one zero per tight cluster in space
    zeros = _dedup_zeros(zeros, 4.0 * grid.spacing)
    total = float(sum(z["line_index"] for z in zeros))
    return ZeroIndexReport(degenerate=False, zeros=zeros, unresolved=unresolved,
                           line_index_sum=total)


def _dedup_zeros(zeros, min_sep):
    kept = []
    for z in sorted(zeros, key=lambda e: e["min_abs_q"]):
        pos = np.asarray(z["position"])
        if all(np.linalg.norm(pos - np.asarray(k["position"])) > min_sep for k in kept):
            kept.append(z)
    return kept
