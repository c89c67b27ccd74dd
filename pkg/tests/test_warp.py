import math

import numpy as np
import pytest

from warphopf import warp
from warphopf._interp1d import bisect_root


def test_space_form_flat():
    m = warp.make_space_form(0.0)
    h, hp, hpp = m.eval(3.0)
    assert (h, hp, hpp) == (3.0, 1.0, 0.0)


def test_space_form_round():
    m = warp.make_space_form(1.0)
    h, hp, hpp = m.eval(math.pi / 2)
    assert abs(h - 1.0) < 1e-15
    assert abs(hp) < 1e-15
    assert abs(hpp + 1.0) < 1e-15
    assert abs(m.t_max - math.pi) < 1e-15


def test_space_form_hyperbolic():
    m = warp.make_space_form(-1.0)
    h, hp, hpp = m.eval(1.0)
    assert abs(h - math.sinh(1.0)) < 1e-14
    assert abs(hp - math.cosh(1.0)) < 1e-14
    assert abs(hpp - math.sinh(1.0)) < 1e-14


def test_domain_enforced():
    m = warp.make_space_form(1.0)
    with pytest.raises(ValueError):
        m.eval(4.0)


def test_dss_s0_against_bisection_oracle(dss_model):
    # independent root of 1 - 2/r = 0
    root = bisect_root(lambda r: 1.0 - 2.0 / r, 1e-6, 1e6)
    assert abs(dss_model.s0 - root) < 1e-12 * max(1.0, root)
    assert abs(dss_model.s0 - 2.0) < 1e-12


def test_dss_initial_conditions(dss_model):
    h, hp, hpp = dss_model.eval(dss_model.t_min)
    assert abs(h - dss_model.s0) < 1e-12
    assert abs(hp) < 1e-12
    # h''(0) = m/(2 s0^2); finite-difference oracle on h'
    assert abs(hpp - 0.25) < 1e-12
    d = 1e-4
    fd = (float(np.asarray(dss_model.eval(d)[1])) - hp) / d
    assert abs(fd - 0.25) < 1e-3


def test_dss_conservation(dss_model):
    assert dss_model.conservation_residual() < 1e-8
    assert warp.make_dss(1.0, 0.0).conservation_residual() < 1e-8


def test_dss_positive_c_window():
    m = warp.make_dss(1.0, 0.1)  # c m^2 = 0.1 < 4/27
    assert m.conservation_residual() < 1e-8
    t, h, v = m.nodes
    assert np.all(v >= -1e-12)          # h' >= 0 up to the turning point
    # domain truncated where the profile peaks below the outer root
    assert v[-1] < 1e-3
    outer = bisect_root(lambda r: 1.0 - 1.0 / r - 0.1 * r * r,
                        1.0 / math.sqrt(0.3), 100.0)
    assert h[-1] <= outer + 1e-6


def test_dss_rejects_bad_params():
    with pytest.raises(ValueError):
        warp.make_dss(-1.0, 0.0)
    with pytest.raises(ValueError):
        warp.make_dss(2.0, 0.2)  # c m^2 = 0.8 >= 4/27


def test_rn_s0_closed_form(rn_model):
    s0 = 2.0 * 0.25 / (2.0 - math.sqrt(3.0))
    assert abs(rn_model.s0 - s0) < 1e-12
    assert abs(rn_model.s0 - (1.0 + math.sqrt(3.0) / 2.0)) < 1e-12
    # the closed form solves the defining polynomial
    assert abs(1.0 - 2.0 / s0 + 0.25 / s0 ** 2) < 1e-12


def test_rn_second_derivative_at_start(rn_model):
    # m/(2 s0^2) - q^2/s0^3 with s0 = 1 + sqrt(3)/2
    s0 = rn_model.s0
    expected = 2.0 / (2.0 * s0 * s0) - 0.25 / s0 ** 3
    assert abs(expected - 0.2487113059642753) < 1e-12
    hpp = float(np.asarray(rn_model.eval(0.0)[2]))
    assert abs(hpp - expected) < 1e-10
    d = 1e-4
    fd = (float(np.asarray(rn_model.eval(d)[1]))
          - float(np.asarray(rn_model.eval(0.0)[1]))) / d
    assert abs(fd - expected) < 1e-3


def test_rn_conservation(rn_model):
    assert rn_model.conservation_residual() < 1e-8


def test_rn_rejects_bad_params():
    with pytest.raises(ValueError):
        warp.make_rn(2.0, 1.0)   # m = 2q
    with pytest.raises(ValueError):
        warp.make_rn(1.0, 0.6)


def test_rn_small_charge_limits_to_dss(dss_model):
    rn = warp.make_rn(2.0, 1e-4)
    ts = np.linspace(0.0, 5.0, 21)
    h_rn = rn.eval(ts)[0]
    h_dss = dss_model.eval(ts)[0]
    assert np.max(np.abs(h_rn - h_dss)) < 1e-3


def test_monotone_profiles(dss_model, rn_model):
    for m in (dss_model, rn_model):
        _, _, v = m.nodes
        assert np.all(v >= -1e-12)


@pytest.mark.parametrize("c", [-1.0, 0.0, 1.0])
def test_space_form_curvatures(c):
    m = warp.make_space_form(c)
    t_hi = m.t_max if math.isfinite(m.t_max) else 3.0
    ts = np.linspace(0.05 * t_hi, 0.95 * t_hi, 50)
    kt, kr = warp.curvatures(m, ts)
    assert np.max(np.abs(kt - c)) < 1e-9
    assert np.max(np.abs(kr - c)) < 1e-9


def test_flat_curvatures_zero():
    kt, kr = warp.curvatures(warp.make_space_form(0.0), 5.0)
    assert kt == 0.0 and kr == 0.0


def test_dss_curvature_gap(dss_model):
    # K_tan - K_rad = 3m/(2h^3), from the conserved relation and its derivative
    ts = np.linspace(0.0, 8.0, 20)
    kt, kr = warp.curvatures(dss_model, ts)
    h = dss_model.eval(ts)[0]
    assert np.max(np.abs((kt - kr) - 3.0 / h ** 3)) < 1e-9


def test_rn_curvature_components(rn_model):
    # K_tan = m/h^3 - q^2/h^4, K_rad = -m/(2h^3) + q^2/h^4
    ts = np.linspace(0.0, 8.0, 20)
    kt, kr = warp.curvatures(rn_model, ts)
    h = rn_model.eval(ts)[0]
    assert np.max(np.abs(kt - (2.0 / h ** 3 - 0.25 / h ** 4))) < 1e-9
    assert np.max(np.abs(kr - (-1.0 / h ** 3 + 0.25 / h ** 4))) < 1e-9


@pytest.mark.parametrize("kind,expected", [("round", True), ("flat", True), ("dss", False)])
def test_origin_smoothness(kind, expected, dss_model):
    model = {"round": warp.make_space_form(1.0),
             "flat": warp.make_space_form(0.0),
             "dss": dss_model}[kind]
    rep = warp.check_origin_smoothness(model)
    assert rep.smooth_pole is expected
    if kind == "dss":
        assert abs(rep.h0 - 2.0) < 1e-10


def test_radicand_algebra_dss(dss_model):
    # warped radicand equals c + m(3 nu^2 - 1)/(2 h^3) for the mass profile
    ts = np.linspace(0.01, 10.0, 100)
    nus = np.linspace(-1.0, 1.0, 21)[:, None]
    kt, kr = warp.curvatures(dss_model, ts)
    h = dss_model.eval(ts)[0]
    lhs = kt - (1.0 - nus ** 2) * (kt - kr)
    rhs = 2.0 * (3.0 * nus ** 2 - 1.0) / (2.0 * h ** 3)
    assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_radicand_algebra_rn(rn_model):
    ts = np.linspace(0.01, 10.0, 100)
    nus = np.linspace(-1.0, 1.0, 21)[:, None]
    kt, kr = warp.curvatures(rn_model, ts)
    h = rn_model.eval(ts)[0]
    lhs = kt - (1.0 - nus ** 2) * (kt - kr)
    rhs = 2.0 * (3.0 * nus ** 2 - 1.0) / (2.0 * h ** 3) \
        + 0.25 * (1.0 - 2.0 * nus ** 2) / h ** 4
    assert np.max(np.abs(lhs - rhs)) < 1e-9
