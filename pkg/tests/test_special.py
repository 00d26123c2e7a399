import math

import mpmath
import numpy as np
import pytest
import scipy.special

from catbitflip import hyperdual as hd
from catbitflip import special
from catbitflip.errors import OverflowGuard
from catbitflip.special import bessel_i_scaled, bessel_ive_all, chin, coth_minus_one, ein, shi

mpmath.mp.dps = 40

XS = [1e-3, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 25.0, 29.9, 30.1, 32.0, 64.0, 128.0, 300.0]


def mp_shi(x):
    return float(mpmath.shi(x))


def mp_chin(x):
    return float(mpmath.chi(x) - mpmath.log(x) - mpmath.euler)


def mp_ein(x):
    x = mpmath.mpf(x)
    return float(mpmath.euler + mpmath.log(abs(x)) + mpmath.e1(x)) if x > 0 else float(
        mpmath.euler + mpmath.log(abs(x)) - mpmath.ei(-x))


@pytest.mark.parametrize("x", XS)
def test_shi_chin_against_oracle(x):
    # just above the switch the smallest asymptotic term is ~30!/30^30 ~ 1e-12
    rel = 2e-12 if 30.0 <= x < 32.0 else 1e-12
    assert shi(x) == pytest.approx(mp_shi(x), rel=rel)
    assert chin(x) == pytest.approx(mp_chin(x), rel=rel)


@pytest.mark.parametrize("x", XS + [-0.5, -3.0, -20.0, -45.0])
def test_ein_against_oracle(x):
    rel = 2e-12 if 30.0 <= abs(x) < 32.0 else 1e-12
    assert ein(x) == pytest.approx(mp_ein(x), rel=rel)


def test_frozen_oracle_values():
    # computed with mpmath at 40 digits before the implementation
    assert shi(2.0) == pytest.approx(2.5015674333549756, rel=1e-14)
    assert shi(4.0) == pytest.approx(9.817326911233034, rel=1e-14)
    assert chin(2.0) == pytest.approx(1.1823040771854364, rel=1e-14)
    assert chin(4.0) == pytest.approx(7.850037532801762, rel=1e-14)
    assert ein(1.0) == pytest.approx(0.7965995992970531, rel=1e-14)


@pytest.mark.parametrize("x", [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 100.0])
def test_shi_minus_chin_is_ein(x):
    scale = max(shi(x), chin(x), ein(x))
    assert abs(shi(x) - chin(x) - ein(x)) <= 1e-12 * scale


@pytest.mark.parametrize("x", [25.0, 30.0, 35.0])
def test_branches_agree_near_switch(x):
    for f in (shi, chin, ein):
        s, a = f(x, branch="series"), f(x, branch="asymptotic")
        assert abs(s - a) <= 1e-9 * abs(s)


def test_zero_and_guards():
    assert shi(0.0) == chin(0.0) == ein(0.0) == 0.0
    with pytest.raises(OverflowGuard):
        shi(800.0)
    with pytest.raises(ValueError):
        chin(-1.0)
    assert special.special_value("ein", 40.0).method_tag == "asymptotic"


def test_ein_derivatives():
    for x in (-2.0, -0.1, 1e-4, 0.3, 2.5, 12.0):
        assert special.ein_prime(x) == pytest.approx(float(mpmath.diff(lambda t: mp_ein_any(t), x)), rel=1e-10)
        assert special.ein_second(x) == pytest.approx(float(mpmath.diff(lambda t: mp_ein_any(t), x, 2)), rel=1e-8)


def mp_ein_any(t):
    # Ein(t) = int_0^t (1 - e^{-s})/s ds, valid for either sign
    return mpmath.quad(lambda s: -mpmath.expm1(-s) / s, [0, t])


def test_coth_minus_one_no_cancellation():
    assert coth_minus_one(0.3) == pytest.approx(1.0 / math.tanh(0.3) - 1.0, rel=1e-13)
    assert coth_minus_one(40.0) == pytest.approx(float(mpmath.coth(40) - 1), rel=1e-13)


@pytest.mark.parametrize("x", [0.0, 0.05, 1.0, 4.0, 16.0, 80.0])
def test_bessel_recurrence_against_scipy(x):
    got = bessel_ive_all(60, x)
    ref = scipy.special.ive(np.arange(61), x)
    mask = ref > 1e-290
    np.testing.assert_allclose(got[mask], ref[mask], rtol=1e-12)


@pytest.mark.parametrize("order,x", [(0, 2.0), (3, 4.0), (7, 16.0), (12, 5.0)])
def test_bessel_methods_agree(order, x):
    rec = bessel_i_scaled(order, x, "recurrence")
    quad = bessel_i_scaled(order, x, "quadrature")
    assert quad == pytest.approx(rec, rel=1e-10)
    assert rec == pytest.approx(float(mpmath.besseli(order, x) * mpmath.exp(-x)), rel=1e-12)


def test_numba_and_numpy_kernels_agree():
    for x in (0.5, 8.0, 29.0):
        assert np.allclose(special._shi_chin_series_nb(x), special._shi_chin_series_np(x), rtol=1e-13)
        assert special._ein_pos_series_nb(x) == pytest.approx(special._ein_pos_series_np(x), rel=1e-13)
    np.testing.assert_allclose(special._bessel_ive_all_nb(40, 6.0), special._bessel_ive_all_np(40, 6.0), rtol=1e-13)


def test_hyperdual_mixed_derivative():
    x = hd.HyperDual(0.7, 1.0, 0.0)
    y = hd.HyperDual(-0.4, 0.0, 1.0)
    f = hd.ein(x * y) * hd.sinh(x) / (1.0 + hd.exp(y))
    g = lambda a, b: mpmath.quad(lambda s: -mpmath.expm1(-s) / s, [0, a * b]) * mpmath.sinh(a) / (1 + mpmath.exp(b))
    assert f.v == pytest.approx(float(g(0.7, -0.4)), rel=1e-13)
    assert f.dx == pytest.approx(float(mpmath.diff(g, (0.7, -0.4), (1, 0))), rel=1e-10)
    assert f.dxy == pytest.approx(float(mpmath.diff(g, (0.7, -0.4), (1, 1))), rel=1e-9)
