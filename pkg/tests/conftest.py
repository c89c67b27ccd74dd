import math

import numpy as np
import pytest

from warphopf import ambient, immersion, warp


def find_t_for_h(model, target, hi=20.0):
    """Invert h(t) = target by bisection on the stored profile."""
    lo = model.t_min
    f = lambda t: float(np.asarray(model.eval(t)[0])) - target
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@pytest.fixture(scope="session")
def dss_model():
    return warp.make_dss(2.0, 0.0)


@pytest.fixture(scope="session")
def rn_model():
    return warp.make_rn(2.0, 0.5)


@pytest.fixture(scope="session")
def dss_t0(dss_model):
    return find_t_for_h(dss_model, 3.0)


@pytest.fixture(scope="session")
def rn_t0(rn_model):
    return find_t_for_h(rn_model, 3.0)


@pytest.fixture(scope="session")
def dss_factor(dss_model, dss_t0):
    # gauge: u = 1 on the h = 3 slice
    return ambient.radial_from_warp(dss_model, 3.0, t_ref=dss_t0)


@pytest.fixture(scope="session")
def rn_factor(rn_model, rn_t0):
    return ambient.radial_from_warp(rn_model, 3.0, t_ref=rn_t0)


@pytest.fixture(scope="session")
def flat_model():
    return warp.make_space_form(0.0)


@pytest.fixture(scope="session")
def flat_factor(flat_model):
    # u identically 1, G the identity
    return ambient.radial_from_warp(flat_model, 1.0, t_ref=1.0)


@pytest.fixture(scope="session")
def round_model():
    return warp.make_space_form(1.0)


@pytest.fixture(scope="session")
def round_factor(round_model):
    # gauge A = 2: u = 1 + r^2/4
    return ambient.radial_from_warp(round_model, 2.0, t_ref=math.pi / 2)


@pytest.fixture(scope="session")
def hyp_model():
    return warp.make_space_form(-1.0)


@pytest.fixture(scope="session")
def hyp_factor(hyp_model):
    # gauge A = 1: u = (1 - r^2)/2 on the unit ball
    return ambient.radial_from_warp(hyp_model, math.tanh(0.5), t_ref=1.0)


@pytest.fixture(scope="session")
def dss_slice_shape(dss_model, dss_factor, dss_t0):
    grid = immersion.build_surface(immersion.SurfaceSpec.slice_at(dss_t0), dss_factor, 96)
    return grid, immersion.shape_field(grid, dss_factor)
