import math

import numpy as np
import pytest

from warphopf import ambient, warp


def rand_point(rng, factor, r_lo=None, r_hi=None):
    r0, r1 = factor.annulus
    lo = r_lo if r_lo is not None else (r0 if r0 > 0 else 0.05)
    hi = r_hi if r_hi is not None else (min(r1, 3.0) if math.isfinite(r1) else 3.0)
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    return d * rng.uniform(lo * 1.02, hi * 0.9)


# ---------------------------------------------------------------- factors

def test_flat_factor_is_trivial(flat_factor):
    r = np.array([0.5, 2.0, 7.0])
    u, du, ddu = flat_factor.eval(r)
    assert np.all(u == 1.0) and np.all(du == 0.0) and np.all(ddu == 0.0)
    assert np.allclose(flat_factor.G(r), r, atol=0)


def test_round_factor_gauge(round_factor):
    # anchor 2 at t = pi/2 gives the classical u = 1 + r^2/4
    r = np.linspace(0.1, 3.0, 13)
    u, du, ddu = round_factor.eval(r)
    assert np.max(np.abs(u - (1.0 + r * r / 4.0))) < 1e-12
    assert np.max(np.abs(du - r / 2.0)) < 1e-12
    assert np.max(np.abs(ddu - 0.5)) < 1e-12


def test_hyperbolic_factor_gauge(hyp_factor):
    r = np.linspace(0.05, 0.9, 9)
    u = hyp_factor.eval(r)[0]
    assert np.max(np.abs(u - 0.5 * (1.0 - r * r))) < 1e-12
    assert hyp_factor.annulus[1] == pytest.approx(1.0)


@pytest.mark.parametrize("which,value", [("round", 1.0), ("hyp", -1.0)])
def test_space_form_sectional_constant(which, value, round_factor, hyp_factor):
    factor = round_factor if which == "round" else hyp_factor
    rng = np.random.default_rng(7)
    for _ in range(25):
        x = rand_point(rng, factor)
        a, b = rng.normal(size=3), rng.normal(size=3)
        assert abs(ambient.sectional(factor, x, a, b) - value) < 1e-8


def test_pairing_invariant_r_over_u(dss_factor, dss_model):
    r0, r1 = dss_factor.annulus
    r = np.linspace(r0 * 1.01, min(r1 * 0.99, r0 * 40), 60)
    t = dss_factor.G(r)
    u = dss_factor.eval(r)[0]
    h = dss_model.eval(t)[0]
    assert np.max(np.abs(r / u - h)) < 1e-8


def test_g_roundtrip(dss_factor, rn_factor):
    for factor in (dss_factor, rn_factor):
        r0, r1 = factor.annulus
        r = np.linspace(r0 * 1.01, r1 * 0.99, 200)
        back = factor.G_inv(factor.G(r))
        assert np.max(np.abs(back - r) / np.maximum(1.0, r)) < 1e-10


def test_radial_from_warp_rejects_vanishing_profile():
    model = warp.make_space_form(1.0)  # h -> 0 at both ends
    # force the generic integration path through a custom-kind clone
    clone = warp.WarpingModel(kind="custom", t_min=model.t_min, t_max=model.t_max,
                              s0=0.0, params=dict(model.params), _eval=model._eval)
    with pytest.raises(ValueError):
        ambient.radial_from_warp(clone, 1.0)


# ---------------------------------------------------------------- christoffel

def test_christoffel_flat_zero(flat_factor):
    g = ambient.christoffel(flat_factor, np.array([0.3, -0.2, 0.5]))
    assert np.all(g == 0.0)


def test_christoffel_symmetry(round_factor):
    rng = np.random.default_rng(3)
    for _ in range(10):
        g = ambient.christoffel(round_factor, rand_point(rng, round_factor))
        assert np.max(np.abs(g - np.swapaxes(g, -1, -2))) == 0.0


def test_christoffel_round_value(round_factor):
    # u = 1 + r^2/4 at (1,0,0): f_1 = u'(1)/u(1) = 0.4
    g = ambient.christoffel(round_factor, np.array([1.0, 0.0, 0.0]))
    assert abs(g[0, 0, 0] + 0.4) < 1e-12


def test_christoffel_against_logF_differences(dss_factor):
    # f_i = d_i log F by central differences fixes every table entry
    rng = np.random.default_rng(11)
    x = rand_point(rng, dss_factor)
    step = 1e-6 * max(1.0, np.linalg.norm(x))
    f = np.empty(3)
    for i in range(3):
        e = np.zeros(3)
        e[i] = step
        f[i] = (math.log(float(dss_factor.F(x + e)))
                - math.log(float(dss_factor.F(x - e)))) / (2 * step)
    g = ambient.christoffel(dss_factor, x)
    eye = np.eye(3)
    expected = -(eye[:, :, None] * f[None, None, :]
                 + eye[:, None, :] * f[None, :, None]
                 - eye[None, :, :] * f[:, None, None])
    assert np.max(np.abs(g - expected)) < 1e-8


# ---------------------------------------------------------------- frame connection

def test_frame_connection_flat(flat_factor):
    c = ambient.frame_connection(flat_factor, np.array([1.0, 2.0, 3.0]))
    assert np.all(c == 0.0)


def test_frame_connection_metric_compatibility(round_factor):
    # <nabla_{E_i} E_j, E_k> + <E_j, nabla_{E_i} E_k> = 0: coefficient antisymmetry
    rng = np.random.default_rng(5)
    c = ambient.frame_connection(round_factor, rand_point(rng, round_factor))
    assert np.max(np.abs(c + np.swapaxes(c, -1, -2))) < 1e-14


def test_frame_connection_vs_christoffel(dss_factor):
    # nabla_{E_i} E_j = F^2 nabla_{e_i} e_j + F F_i e_j, expanded in the frame
    rng = np.random.default_rng(6)
    x = rand_point(rng, dss_factor)
    u, du, _ = (float(np.asarray(v)) for v in dss_factor.eval(np.linalg.norm(x)))
    g = ambient.christoffel(dss_factor, x)
    r = np.linalg.norm(x)
    grad_f = du * x / r
    c = ambient.frame_connection(dss_factor, x)
    # coefficient of E_k in F^2 Gamma^k_ij e_k + F F_i e_j is
    # F Gamma^k_ij + F_i delta_jk  (since e_k = E_k / F)
    expected = u * np.einsum("kij->ijk", g) + grad_f[:, None, None] * np.eye(3)[None, :, :]
    assert np.max(np.abs(c - expected)) < 1e-10


# ---------------------------------------------------------------- riemann

def test_riemann_flat_zero(flat_factor):
    rng = np.random.default_rng(0)
    v = ambient.riemann(flat_factor, np.array([1.0, 0.5, -0.2]),
                        rng.normal(size=3), rng.normal(size=3), rng.normal(size=3))
    assert np.max(np.abs(v)) == 0.0


def test_riemann_antisymmetry(dss_factor):
    rng = np.random.default_rng(9)
    for _ in range(10):
        x = rand_point(rng, dss_factor)
        a, b, c = rng.normal(size=3), rng.normal(size=3), rng.normal(size=3)
        r1 = ambient.riemann(dss_factor, x, a, b, c)
        r2 = ambient.riemann(dss_factor, x, b, a, c)
        assert np.max(np.abs(r1 + r2)) < 1e-12 * max(1.0, np.max(np.abs(r1)))


def test_riemann_first_bianchi(round_factor):
    rng = np.random.default_rng(10)
    for _ in range(10):
        x = rand_point(rng, round_factor)
        a, b, c = rng.normal(size=3), rng.normal(size=3), rng.normal(size=3)
        total = (ambient.riemann(round_factor, x, a, b, c)
                 + ambient.riemann(round_factor, x, b, c, a)
                 + ambient.riemann(round_factor, x, c, a, b))
        assert np.max(np.abs(total)) < 1e-10


def test_riemann_vs_oracle_all_profiles(flat_factor, round_factor, hyp_factor,
                                        dss_factor, rn_factor):
    rng = np.random.default_rng(12)
    profiles = [flat_factor, round_factor, hyp_factor, dss_factor, rn_factor]
    for factor in profiles:
        worst = 0.0
        for _ in range(25):
            x = rand_point(rng, factor)
            a, b, c = rng.normal(size=3), rng.normal(size=3), rng.normal(size=3)
            exact = ambient.riemann(factor, x, a, b, c)
            fd = ambient.riemann_oracle(factor, x, a, b, c)
            scale = max(np.max(np.abs(fd)), 1e-10)
            worst = max(worst, float(np.max(np.abs(exact - fd)) / scale))
        assert worst < 1e-6, factor.kind


def test_oracle_first_bianchi(dss_factor):
    rng = np.random.default_rng(13)
    x = rand_point(rng, dss_factor)
    a, b, c = rng.normal(size=3), rng.normal(size=3), rng.normal(size=3)
    total = (ambient.riemann_oracle(dss_factor, x, a, b, c)
             + ambient.riemann_oracle(dss_factor, x, b, c, a)
             + ambient.riemann_oracle(dss_factor, x, c, a, b))
    assert np.max(np.abs(total)) < 1e-6


# ---------------------------------------------------------------- sectional

def test_sectional_schur_plane_independence(round_factor, hyp_factor):
    rng = np.random.default_rng(14)
    for factor in (round_factor, hyp_factor):
        x = rand_point(rng, factor)
        vals = [ambient.sectional(factor, x, rng.normal(size=3), rng.normal(size=3))
                for _ in range(8)]
        assert max(vals) - min(vals) < 1e-8


def test_sectional_matches_profile_curvatures(dss_factor, dss_model):
    # tangent plane -> K_tan, radial plane -> K_rad
    for t_q in (1.5, 2.5, 4.0):
        r_q = float(np.asarray(dss_factor.G_inv(t_q)))
        kt, kr = warp.curvatures(dss_model, t_q)
        x = np.array([0.0, 0.0, r_q])
        s_tan = ambient.sectional(dss_factor, x, np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
        s_rad = ambient.sectional(dss_factor, x, np.array([1.0, 0, 0]), np.array([0, 0, 1.0]))
        assert abs(s_tan - kt) < 1e-7
        assert abs(s_rad - kr) < 1e-7


def test_sectional_rejects_degenerate_span(round_factor):
    x = np.array([1.0, 0.0, 0.0])
    a = np.array([1.0, 2.0, 0.0])
    with pytest.raises(ValueError):
        ambient.sectional(round_factor, x, a, 2.0 * a)


def test_sectional_gauge_invariance(dss_model):
    fa = ambient.radial_from_warp(dss_model, 1.0, t_ref=2.0)
    fb = ambient.radial_from_warp(dss_model, 2.5, t_ref=3.5)
    rng = np.random.default_rng(15)
    for t_q in (1.0, 2.0, 4.0, 6.0):
        ka, kb = [], []
        for factor in (fa, fb):
            r_q = float(np.asarray(factor.G_inv(t_q)))
            x = np.array([0.0, 0.0, r_q])
            ka_ = ambient.sectional(factor, x, np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
            kb_ = ambient.sectional(factor, x, np.array([1.0, 0, 0]), np.array([0, 0, 1.0]))
            ka.append(ka_)
            kb.append(kb_)
        assert abs(ka[0] - ka[1]) < 1e-7
        assert abs(kb[0] - kb[1]) < 1e-7


# ---------------------------------------------------------------- radial hessian

def test_hess_radial_flat_zero(flat_factor):
    v = ambient.hess_radial(flat_factor, np.array([1.0, 1.0, 0.0]),
                            np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
    assert v == 0.0


def test_hess_radial_tangential_pair(dss_factor):
    # a, b orthogonal to x: only the isotropic u'/r term survives
    rng = np.random.default_rng(16)
    x = rand_point(rng, dss_factor)
    r = np.linalg.norm(x)
    a = np.cross(x, rng.normal(size=3))
    b = np.cross(x, a)
    u, du, _ = (np.asarray(v) for v in dss_factor.eval(r))
    expected = (du / r) * np.dot(a, b)
    assert abs(ambient.hess_radial(dss_factor, x, a, b) - expected) < 1e-10 * max(1, abs(expected))


def test_hess_radial_vs_fd(dss_factor, round_factor):
    rng = np.random.default_rng(17)
    for factor in (dss_factor, round_factor):
        worst = 0.0
        for _ in range(50):
            x = rand_point(rng, factor)
            a, b = rng.normal(size=3), rng.normal(size=3)
            step = 1e-5 * max(1.0, np.linalg.norm(x))
            # central second difference of F along a/b directions
            hess = np.empty((3, 3))
            for i in range(3):
                for j in range(3):
                    ei = np.zeros(3)
                    ej = np.zeros(3)
                    ei[i] = step
                    ej[j] = step
                    hess[i, j] = (float(factor.F(x + ei + ej)) - float(factor.F(x + ei - ej))
                                  - float(factor.F(x - ei + ej)) + float(factor.F(x - ei - ej))) \
                        / (4 * step * step)
            fd = a @ hess @ b
            exact = float(ambient.hess_radial(factor, x, a, b))
            worst = max(worst, abs(exact - fd) / max(1.0, abs(fd)))
        assert worst < 1e-5


# ---------------------------------------------------------------- warp_from_radial

def test_warp_from_radial_flat(flat_factor):
    model = ambient.warp_from_radial(flat_factor)
    ts = np.linspace(0.5, 5.0, 9)
    h, hp, hpp = model.eval(ts)
    assert np.max(np.abs(h - ts)) < 1e-9
    assert np.max(np.abs(hp - 1.0)) < 1e-9
    assert np.max(np.abs(hpp)) < 1e-9


def test_warp_from_radial_round_profile():
    def u_fn(r):
        return 1.0 + r * r / 4.0, r / 2.0, 0.5 * np.ones_like(r)

    factor = ambient.profile_factor(u_fn, (0.05, 3.0), r_anchor=1.0, t_anchor=None or 0.0)
    model = ambient.warp_from_radial(factor)
    ts = np.linspace(model.t_min + 0.1, model.t_max - 0.1, 15)
    kt, kr = warp.curvatures(model, ts)
    assert np.max(np.abs(kt - 1.0)) < 1e-8
    assert np.max(np.abs(kr - 1.0)) < 1e-8


def test_warp_from_radial_roundtrip_dss(dss_factor, dss_model):
    model2 = ambient.warp_from_radial(dss_factor)
    ts = np.linspace(max(model2.t_min, 0.2), min(model2.t_max, 8.0), 40)
    h1 = dss_model.eval(ts)[0]
    h2 = model2.eval(ts)[0]
    assert np.max(np.abs(h1 - h2)) < 1e-7
