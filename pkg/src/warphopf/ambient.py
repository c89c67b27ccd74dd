"""The conformally flat ambient 3-manifold (R^3, delta / F^2) with radial F.

F(x) = u(|x|) for a positive radial profile u, so the metric is
<a, b>_F = (a . b) / F^2 on an annulus of validity.  The same space carries a
warped-product description dt^2 + h(t)^2 dw^2 through the change of variable
dr / u(r) = dt,  r / u(r) = h(t); `radial_from_warp` and `warp_from_radial`
convert between the two pictures.

Curvature comes in closed form from the conformal change g -> e^{2 phi} g
with phi = -log F over the flat base: the Riemann tensor is assembled from
the Euclidean gradient and Hessian of phi.  `riemann` uses the convention
R(X,Y)Z = \\nabla_X \\nabla_Y Z - \\nabla_Y \\nabla_X Z - \\nabla_{[X,Y]} Z,
so sectional curvature is <R(A,B)B, A>_F normalized by the Gram determinant
and the round-ball profile u = 1 + r^2/4 yields +1.  `riemann_oracle` is a
slow finite-difference check assembled directly from the Christoffel table.

Vector arguments are Euclidean coordinate triples; all operations broadcast
over leading axes and accept complex components (bilinear extension, no
conjugation), which is what the complexified surface calculus needs.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._interp1d import CubicHermite, cumulative_corrected_trapezoid
from .warp import WarpingModel

__all__ = [
    "RadialConformalFactor",
    "radial_from_warp",
    "warp_from_radial",
    "profile_factor",
    "christoffel",
    "frame_connection",
    "riemann",
    "riemann_oracle",
    "sectional",
    "hess_radial",
]


@dataclass(frozen=True)
class RadialConformalFactor:
    """Radial conformal profile u with derivatives, annulus and arc-length maps.

    G integrates dt = dr / u(r) (so G is strictly increasing), G_inv is its
    inverse.  w1 = u'/r and w2 = (u'' - u'/r)/r^2 are the two weights of the
    Euclidean Hessian of F; closed-form profiles supply them exactly, which
    keeps everything finite on surfaces passing near the origin.
    """

    annulus: tuple
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    model: Optional[WarpingModel] = None
    _eval: Callable = None        # r -> (u, u', u'')
    _G: Callable = None           # r -> t
    _G_inv: Callable = None       # t -> r
    _w1: Optional[Callable] = None
    _w2: Optional[Callable] = None

    def eval(self, r):
        return self._eval(np.asarray(r, dtype=float))

    def G(self, r):
        return self._G(np.asarray(r, dtype=float))

    def G_inv(self, t):
        return self._G_inv(np.asarray(t, dtype=float))

    def F(self, x):
        """Conformal factor at Euclidean points x (..., 3)."""
        r = np.linalg.norm(np.asarray(x, dtype=float), axis=-1)
        return self.eval(r)[0]

    def hessian_weights(self, r):
        """(w1, w2) with Hess F(a,b) = w1 (a.b) + w2 (x.a)(x.b)."""
        r = np.asarray(r, dtype=float)
        if self._w1 is not None:
            return self._w1(r), self._w2(r)
        u, du, ddu = self._eval(r)
        w1 = du / r
        return w1, (ddu - w1) / (r * r)

    def check_point(self, x):
        """Raise if any point leaves the validity annulus."""
        r = np.linalg.norm(np.asarray(x, dtype=float), axis=-1)
        r0, r1 = self.annulus
        tol = 1e-12 * max(1.0, abs(r1) if math.isfinite(r1) else 1.0)
        if np.any(r < r0 - tol) or np.any(r > r1 + tol):
            bad = float(np.min(r)) if np.any(r < r0 - tol) else float(np.max(r))
            raise ValueError(f"point radius {bad} outside annulus {self.annulus}")


# ---------------------------------------------------------------------------
# constructors

def radial_from_warp(model: WarpingModel, r_anchor: float, t_ref=None) -> RadialConformalFactor:
    """Radial picture of a warped profile; the gauge is fixed by r(t_ref) = r_anchor.

    Constant-curvature profiles come out in closed form (the flat, round-ball
    and hyperbolic-ball models); ODE-defined profiles integrate
    d(log r)/dt = 1/h over the stored node grid.
    """
    if r_anchor <= 0.0:
        raise ValueError("r_anchor must be positive")
    kind = model.kind
    if kind in ("euclidean", "sphere", "hyperbolic"):
        return _space_form_factor(model, r_anchor, t_ref)
    return _integrated_factor(model, r_anchor, t_ref)


def _space_form_factor(model, r_anchor, t_ref):
    c = model.params["c"]
    if model.kind == "euclidean":
        if t_ref is None:
            t_ref = 1.0
        u0 = r_anchor / t_ref

        def ev(r):
            one = np.ones_like(r)
            return u0 * one, 0.0 * one, 0.0 * one

        return RadialConformalFactor(
            annulus=(0.0, math.inf), kind="euclidean", params={"c": 0.0, "u0": u0},
            model=model,
            _eval=ev, _G=lambda r: r / u0, _G_inv=lambda t: u0 * t,
            _w1=lambda r: np.zeros_like(r), _w2=lambda r: np.zeros_like(r))

    k = math.sqrt(abs(c))
    if c > 0.0:
        if t_ref is None:
            t_ref = 0.5 * math.pi / k
        A = r_anchor / math.tan(0.5 * k * t_ref)

        def ev(r):
            return 0.5 * k * (A + r * r / A), k * r / A, (k / A) * np.ones_like(r)

        return RadialConformalFactor(
            annulus=(0.0, math.inf), kind="round_ball", params={"c": c, "A": A},
            model=model,
            _eval=ev,
            _G=lambda r: (2.0 / k) * np.arctan(r / A),
            _G_inv=lambda t: A * np.tan(0.5 * k * t),
            _w1=lambda r: (k / A) * np.ones_like(r),
            _w2=lambda r: np.zeros_like(r))

    if t_ref is None:
        t_ref = 1.0
    A = r_anchor / math.tanh(0.5 * k * t_ref)

    def ev(r):
        return 0.5 * k * (A - r * r / A), -k * r / A, (-k / A) * np.ones_like(r)

    return RadialConformalFactor(
        annulus=(0.0, A), kind="hyperbolic_ball", params={"c": c, "A": A},
        model=model,
        _eval=ev,
        _G=lambda r: (2.0 / k) * np.arctanh(r / A),
        _G_inv=lambda t: A * np.tanh(0.5 * k * t),
        _w1=lambda r: (-k / A) * np.ones_like(r),
        _w2=lambda r: np.zeros_like(r))


def _integrated_factor(model, r_anchor, t_ref):
    if model.nodes is not None:
        t = model.nodes[0]
        h, hp, _ = model.eval(t)
    else:
        if not math.isfinite(model.t_max):
            raise ValueError("profile without nodes needs a finite domain")
        t = np.linspace(model.t_min, model.t_max, 8001)
        h, hp, _ = model.eval(t)
    if np.any(h <= 0.0):
        raise ValueError("profile reaches h = 0 inside the domain; log-radius integral diverges")
    if t_ref is None:
        t_ref = 0.5 * (t[0] + t[-1])
    g = 1.0 / h
    dg = -hp / (h * h)
    integral = cumulative_corrected_trapezoid(t, g, dg)
    i_of_t = CubicHermite(t, integral, g)
    log_r = math.log(r_anchor) + integral - i_of_t(t_ref)
    r_nodes = np.exp(log_r)
    g_inv = CubicHermite(t, r_nodes, r_nodes / h)
    g_fwd = CubicHermite(r_nodes, t, h / r_nodes)
    model_ref = model

    def ev(r):
        tq = g_fwd(r)
        hq, hpq, hppq = model_ref.eval(np.clip(tq, model_ref.t_min, model_ref.t_max))
        u = r / hq
        du = (1.0 - hpq) / hq
        ddu = (-hppq / hq - (1.0 - hpq) * hpq / (hq * hq)) / u
        return u, du, ddu

    return RadialConformalFactor(
        annulus=(float(r_nodes[0]), float(r_nodes[-1])),
        kind=f"warped_{model.kind}", params=dict(model.params),
        model=model, _eval=ev, _G=g_fwd, _G_inv=g_inv)


def warp_from_radial(factor: RadialConformalFactor, margin=1e-9) -> WarpingModel:
    """Warped-product profile h(t) = r/u(r) at r = G_inv(t), derivatives included.

    h' and h'' come from the exact relations u' = (1 - h')/h and
    u'' u = -h''/h - (1 - h') h'/h^2 solved for the profile derivatives.
    """
    r0, r1 = factor.annulus
    if not math.isfinite(r1):
        r1 = 1e8
    r0 = max(r0, 1e-12)
    span = r1 - r0
    t_min = float(factor.G(r0 + margin * span))
    t_max = float(factor.G(r1 - margin * span))

    def ev(t):
        r = factor.G_inv(t)
        u, du, ddu = factor.eval(np.asarray(r))
        h = r / u
        hp = 1.0 - du * h
        hpp = -h * ddu * u - (1.0 - hp) * hp / h
        return h, hp, hpp

    h0 = float(np.asarray(ev(np.asarray(t_min))[0]))
    return WarpingModel(kind="custom", t_min=t_min, t_max=t_max, s0=h0,
                        params=dict(factor.params), _eval=ev)


def profile_factor(u_fn, annulus, r_anchor=None, t_anchor=0.0, n_nodes=6001,
                   kind="custom") -> RadialConformalFactor:
    """Factor from an explicit radial profile; u_fn(r) -> (u, u', u'').

    The arc-length map G integrates 1/u numerically on a dense grid over the
    annulus, anchored by G(r_anchor) = t_anchor.
    """
    r0, r1 = annulus
    if not (0.0 <= r0 < r1) or not math.isfinite(r1):
        raise ValueError("annulus must be a finite interval (r0, r1), r0 >= 0")
    r = np.linspace(r0, r1, n_nodes)
    u, du, _ = u_fn(r)
    if np.any(u <= 0.0):
        raise ValueError("profile must be positive on the annulus")
    g = 1.0 / u
    dg = -du / (u * u)
    integral = cumulative_corrected_trapezoid(r, g, dg)
    i_of_r = CubicHermite(r, integral, g)
    if r_anchor is None:
        r_anchor = r0
    t = t_anchor + integral - i_of_r(r_anchor)
    g_fwd = CubicHermite(r, t, g)
    g_inv = CubicHermite(t, r, u)
    return RadialConformalFactor(annulus=(float(r0), float(r1)), kind=kind,
                                 _eval=u_fn, _G=g_fwd, _G_inv=g_inv)


# ---------------------------------------------------------------------------
# connection and curvature

def _log_gradient(factor, x):
    """f_i = d_i log F = x_i u'/(r u), with shared radial weights."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    u, _, _ = factor.eval(r)
    w1, w2 = factor.hessian_weights(r)
    f = (w1 / u)[..., None] * x
    return x, r, u, w1, w2, f


def christoffel(factor: RadialConformalFactor, x):
    """Christoffel symbols Gamma[..., k, i, j] of the metric delta/F^2.

    For a conformal metric e^{2 phi} delta with phi = -log F the table is
    Gamma^k_ij = -(d_ik f_j + d_jk f_i - d_ij f_k), f = grad log F.
    """
    factor.check_point(x)
    x, r, u, w1, w2, f = _log_gradient(factor, x)
    eye = np.eye(3)
    a = eye[:, :, None] * f[..., None, None, :]     # d_ik f_j
    b = eye[:, None, :] * f[..., None, :, None]     # d_jk f_i
    c = eye[None, :, :] * f[..., :, None, None]     # d_ij f_k
    return -(a + b - c)


def frame_connection(factor: RadialConformalFactor, x):
    """Connection coefficients c[..., i, j, k] of the orthonormal frame E_i = F e_i.

    nabla_{E_i} E_j = sum_k c[..., i, j, k] E_k: for i != j the only term is
    -F_j along E_i; for i = j the derivative spreads over the other two axes.
    """
    factor.check_point(x)
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    w1, _ = factor.hessian_weights(r)
    gradF = w1[..., None] * x
    shape = x.shape[:-1] + (3, 3, 3)
    out = np.zeros(shape, dtype=float)
    for i in range(3):
        for j in range(3):
            if i == j:
                for k in range(3):
                    if k != i:
                        out[..., i, j, k] = gradF[..., k]
            else:
                out[..., i, j, i] = -gradF[..., j]
    return out


def _phi_pack(factor, x):
    """Gradient/Hessian data of phi = -log F at x, all Euclidean closed forms."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    u, du, ddu = factor.eval(r)
    w1, w2 = factor.hessian_weights(r)
    gphi = -(w1 / u)[..., None] * x
    hw1 = -w1 / u
    hw2 = -w2 / u + (w1 / u) ** 2
    norm2 = np.sum(gphi * gphi, axis=-1)
    return x, gphi, hw1, hw2, norm2


def _dot(a, b):
    return np.sum(np.asarray(a) * np.asarray(b), axis=-1)


def riemann(factor: RadialConformalFactor, x, X, Y, Z):
    """R(X,Y)Z at x for the metric delta/F^2 (closed form, broadcasts, complex-safe)."""
    factor.check_point(x)
    xp, gphi, hw1, hw2, norm2 = _phi_pack(factor, x)
    X = np.asarray(X)
    Y = np.asarray(Y)
    Z = np.asarray(Z)

    def hess(a, b):
        return hw1 * _dot(a, b) + hw2 * _dot(xp, a) * _dot(xp, b)

    def hess_vec(a):
        return hw1[..., None] * a + (hw2 * _dot(xp, a))[..., None] * xp

    xphi = _dot(X, gphi)
    yphi = _dot(Y, gphi)
    zphi = _dot(Z, gphi)
    t1 = (hess(Y, Z) - yphi * zphi + _dot(Y, Z) * norm2)[..., None] * X
    t2 = (hess(X, Z) - xphi * zphi + _dot(X, Z) * norm2)[..., None] * Y
    t3 = _dot(Y, Z)[..., None] * (hess_vec(X) - xphi[..., None] * gphi)
    t4 = _dot(X, Z)[..., None] * (hess_vec(Y) - yphi[..., None] * gphi)
    # The conformal-change expression above is in the sign convention where
    # <R(A,B)A, B> is the sectional numerator; flip to match this module's.
    return -(t1 - t2 + t3 - t4)


def riemann_oracle(factor: RadialConformalFactor, x, X, Y, Z, fd_step=None):
    """Brute-force R(X,Y)Z from finite differences of the Christoffel table.

    R^l_ijk = d_i G^l_jk - d_j G^l_ik + G^l_is G^s_jk - G^l_js G^s_ik,
    contracted with X^i Y^j Z^k.  Slow; intended for tests at single points.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise ValueError("oracle evaluates one point at a time")
    if fd_step is None:
        fd_step = 1e-5 * max(1.0, float(np.linalg.norm(x)))
    g0 = christoffel(factor, x)
    dg = np.empty((3, 3, 3, 3))   # [a, l, j, k] = d_a Gamma^l_jk
    for a in range(3):
        e = np.zeros(3)
        e[a] = fd_step
        dg[a] = (christoffel(factor, x + e) - christoffel(factor, x - e)) / (2.0 * fd_step)
    # R[l, i, j, k]
    rt = (np.einsum('iljk->lijk', dg[:, :, :, :])
          - np.einsum('jlik->lijk', dg[:, :, :, :])
          + np.einsum('lis,sjk->lijk', g0, g0)
          - np.einsum('ljs,sik->lijk', g0, g0))
    return np.einsum('lijk,...i,...j,...k->...l', rt, np.asarray(X), np.asarray(Y), np.asarray(Z))


def sectional(factor: RadialConformalFactor, x, A, B):
    """Sectional curvature of span(A, B) at x w.r.t. the metric delta/F^2."""
    factor.check_point(x)
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    u = factor.eval(r)[0]
    f2 = u * u
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    num = _dot(riemann(factor, x, A, B, B), A) / f2
    den = (_dot(A, A) / f2) * (_dot(B, B) / f2) - (_dot(A, B) / f2) ** 2
    if np.any(den <= 1e-14 * np.maximum(_dot(A, A), _dot(B, B)) ** 2 / (f2 * f2)):
        raise ValueError("degenerate span for sectional curvature")
    return num / den


def hess_radial(factor: RadialConformalFactor, x, a, b):
    """Euclidean Hessian of F(x) = u(|x|) applied to the pair (a, b)."""
    factor.check_point(x)
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    w1, w2 = factor.hessian_weights(r)
    return w1 * _dot(a, b) + w2 * _dot(x, np.asarray(a)) * _dot(x, np.asarray(b))
