"""Warping profiles h(t) of rotationally symmetric 3-manifolds.

A metric dt^2 + h(t)^2 dw^2 on an interval times the round 2-sphere is
described here by a `WarpingModel`: the profile h with two derivatives on a
stored domain.  Closed forms cover the constant-curvature cases; the
black-hole-type profiles are defined by first-order ODEs of the form
h'^2 = 1 - m/h - c h^2 (mass/cosmological) or h'^2 = 1 - m/h + q^2/h^2
(mass/charge) and are integrated in the regularized second-order form
h'' = m/(2h^2) - c h (resp. h'' = m/(2h^2) - q^2/h^3), which is smooth at
the left endpoint where h' = 0.  The first-order relation is conserved by
the flow and kept as a self-test.

The two sectional curvatures of the ambient metric are
    K_tan = (1 - h'^2) / h^2      (planes tangent to the spheres)
    K_rad = -h'' / h              (planes containing the radial direction)
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._interp1d import CubicHermite, bisect_root

__all__ = [
    "WarpingModel",
    "SmoothnessReport",
    "make_space_form",
    "make_dss",
    "make_rn",
    "curvatures",
    "check_origin_smoothness",
]


@dataclass(frozen=True)
class WarpingModel:
    """Warping profile h with two derivatives on [t_min, t_max].

    Immutable after construction; `eval` is safe to call concurrently.
    For ODE-defined profiles the dense nodes (t, h, h') are retained so the
    conserved first-order relation can be re-checked at every stored node.
    """

    kind: str                      # euclidean | sphere | hyperbolic | dss | rn | custom
    t_min: float
    t_max: float                   # may be math.inf for closed forms
    s0: float                      # h(t_min)
    params: dict = field(default_factory=dict)
    _eval: Callable = None         # t array -> (h, h', h'') arrays
    nodes: Optional[tuple] = None  # (t, h, h') arrays for ODE profiles

    def eval(self, t):
        """Return (h, h', h'') at t (scalar or array). t must lie in the domain."""
        t_arr = np.asarray(t, dtype=float)
        lo, hi = self.t_min - 1e-12, self.t_max + 1e-12
        if np.any(t_arr < lo) or np.any(t_arr > hi):
            raise ValueError(
                f"t outside domain [{self.t_min}, {self.t_max}] for {self.kind} profile")
        return self._eval(t_arr)

    def h(self, t):
        return self.eval(t)[0]

    def conservation_residual(self):
        """Max |h'^2 - (defining radicand)| over the stored ODE nodes."""
        if self.nodes is None:
            return 0.0
        t, h, v = self.nodes
        if self.kind == "dss":
            m, c = self.params["m"], self.params["c"]
            rad = 1.0 - m / h - c * h * h
        elif self.kind == "rn":
            m, q = self.params["m"], self.params["q"]
            rad = 1.0 - m / h + (q * q) / (h * h)
        else:
            return 0.0
        return float(np.max(np.abs(v * v - rad)))


@dataclass
class SmoothnessReport:
    """Left-endpoint behaviour of a profile: values and a pole-smoothness flag.

    smooth_pole is True when h -> 0, h' -> 1, h'' -> 0 at the left endpoint,
    i.e. the metric closes up smoothly there like polar coordinates.
    """

    h0: float
    dh0: float
    ddh0_fd: float
    smooth_pole: bool
    tol: float


def make_space_form(c: float) -> WarpingModel:
    """Constant-curvature profile: h = t, sin(sqrt(c) t)/sqrt(c) or sinh analogue."""
    c = float(c)
    if c > 0.0:
        k = math.sqrt(c)

        def ev(t):
            return np.sin(k * t) / k, np.cos(k * t), -k * np.sin(k * t)

        return WarpingModel(kind="sphere", t_min=0.0, t_max=math.pi / k,
                            s0=0.0, params={"c": c}, _eval=ev)
    if c < 0.0:
        k = math.sqrt(-c)

        def ev(t):
            return np.sinh(k * t) / k, np.cosh(k * t), k * np.sinh(k * t)

        return WarpingModel(kind="hyperbolic", t_min=0.0, t_max=math.inf,
                            s0=0.0, params={"c": c}, _eval=ev)

    def ev(t):
        t = np.asarray(t, dtype=float)
        return t, np.ones_like(t), np.zeros_like(t)

    return WarpingModel(kind="euclidean", t_min=0.0, t_max=math.inf,
                        s0=0.0, params={"c": 0.0}, _eval=ev)


def _integrate_profile(rhs, s0, h_cap, dt, t_cap):
    """RK4 for h'' = rhs(h), h(0) = s0, h'(0) = 0.

    Stops when h reaches h_cap, when h' turns negative (profile maximum, the
    positive-c case), or at t_cap.  Returns dense node arrays (t, h, h').
    """
    ts = [0.0]
    hs = [s0]
    vs = [0.0]
    t, h, v = 0.0, s0, 0.0
    n_max = int(math.ceil(t_cap / dt)) + 2
    for _ in range(n_max):
        a1 = rhs(h)
        k1h, k1v = v, a1
        h2 = h + 0.5 * dt * k1h
        a2 = rhs(h2)
        k2h, k2v = v + 0.5 * dt * k1v, a2
        h3 = h + 0.5 * dt * k2h
        a3 = rhs(h3)
        k3h, k3v = v + 0.5 * dt * k2v, a3
        h4 = h + dt * k3h
        a4 = rhs(h4)
        k4h, k4v = v + dt * k3v, a4
        h = h + dt * (k1h + 2.0 * k2h + 2.0 * k3h + k4h) / 6.0
        v = v + dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        t = t + dt
        if v < 0.0 or h <= 0.0:
            break
        ts.append(t)
        hs.append(h)
        vs.append(v)
        if h >= h_cap or t >= t_cap:
            break
    return np.array(ts), np.array(hs), np.array(vs)


def _ode_model(kind, params, s0, rhs, t_max=None, dt=None):
    if dt is None:
        dt = min(2e-3 * max(1.0, s0), 4e-3)
    h_cap = 50.0 * s0
    t_cap = t_max if t_max is not None else 80.0 * s0 + 100.0
    t, h, v = _integrate_profile(rhs, s0, h_cap, dt, t_cap)
    if len(t) < 8:
        raise ValueError(f"{kind} profile domain collapsed (parameters too extreme)")
    acc = np.array([rhs(x) for x in h])
    h_of_t = CubicHermite(t, h, v)
    v_of_t = CubicHermite(t, v, acc)

    def ev(tq):
        hq = h_of_t(tq)
        vq = v_of_t(tq)
        aq = rhs(np.asarray(hq))
        return hq, vq, aq

    model = WarpingModel(kind=kind, t_min=0.0, t_max=float(t[-1]), s0=s0,
                         params=params, _eval=ev, nodes=(t, h, v))
    res = model.conservation_residual()
    if res > 1e-8:
        raise RuntimeError(f"{kind} integration lost its conserved relation: {res:.3e}")
    return model


def make_dss(m: float, c: float, t_max=None, dt=None) -> WarpingModel:
    """Mass-m profile with cosmological term c: h'^2 = 1 - m/h - c h^2.

    Requires m > 0; for c > 0 also c m^2 < 4/27 so the radicand has a
    positivity window (s0, s1).  h starts at the inner root s0 with h' = 0.
    For c > 0 the domain is truncated where h' returns to zero (h -> s1).
    """
    m, c = float(m), float(c)
    if m <= 0.0:
        raise ValueError("mass m must be positive")
    if c > 0.0 and c * m * m >= 4.0 / 27.0:
        raise ValueError("c*m^2 must be below 4/27 for a positivity window")

    # s0 = inner boundary of {r > 0 : 1 - m/r - c r^2 > 0}; as a polynomial
    # root of g(r) = r - m - c r^3 it is bracketed by (0, r*] with g' > 0.
    def g(r):
        return r - m - c * r ** 3

    if c > 0.0:
        r_star = 1.0 / math.sqrt(3.0 * c)
        s0 = bisect_root(g, 1e-12, r_star)
    else:
        hi = m + 1.0
        while g(hi) <= 0.0:
            hi *= 2.0
        s0 = bisect_root(g, 1e-12, hi)

    def rhs(h):
        return m / (2.0 * h * h) - c * h

    return _ode_model("dss", {"m": m, "c": c}, s0, rhs, t_max=t_max, dt=dt)


def make_rn(m: float, q: float, t_max=None, dt=None) -> WarpingModel:
    """Mass-m, charge-q profile: h'^2 = 1 - m/h + q^2/h^2, needs m > 2q > 0."""
    m, q = float(m), float(q)
    if not (m > 2.0 * q > 0.0):
        raise ValueError("parameters must satisfy m > 2q > 0")
    # outer root of 1 - m/r + q^2/r^2; rationalized form of 2q^2/(m - sqrt(m^2-4q^2)),
    # stable for q -> 0
    s0 = 0.5 * (m + math.sqrt(m * m - 4.0 * q * q))

    def rhs(h):
        return m / (2.0 * h * h) - (q * q) / (h ** 3)

    return _ode_model("rn", {"m": m, "q": q}, s0, rhs, t_max=t_max, dt=dt)


def curvatures(model: WarpingModel, t):
    """Sectional curvatures (K_tan, K_rad) of the warped metric at t."""
    h, hp, hpp = model.eval(t)
    k_tan = (1.0 - hp * hp) / (h * h)
    k_rad = -hpp / h
    return k_tan, k_rad


def check_origin_smoothness(model: WarpingModel, tol=1e-5, fd_step=1e-4) -> SmoothnessReport:
    """Probe the left endpoint: values of h, h' and a one-sided FD estimate of h''.

    The flag is set only when the endpoint looks like a smooth polar origin
    (h = 0, h' = 1, h'' = 0 within tol); profiles starting on a positive
    sphere h = s0 > 0 report smooth_pole = False.
    """
    t0 = model.t_min
    d = fd_step
    h0 = float(np.asarray(model.eval(t0)[0]))
    dh0 = float(np.asarray(model.eval(t0)[1]))
    samples = [float(np.asarray(model.eval(t0 + k * d)[0])) for k in range(4)]
    ddh0 = (2.0 * samples[0] - 5.0 * samples[1] + 4.0 * samples[2] - samples[3]) / (d * d)
    smooth = abs(h0) < tol and abs(dh0 - 1.0) < tol and abs(ddh0) < tol
    return SmoothnessReport(h0=h0, dh0=dh0, ddh0_fd=ddh0, smooth_pole=smooth, tol=tol)
