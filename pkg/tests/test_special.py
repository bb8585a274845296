import math

import numpy as np
import pytest
import sympy as sp

from stargen import (DomainError, PhaseGrid, SpatialGrid, UnsupportedError, WindowedTransform,
                     cross_wigner, hermite_function, hermite_normalization, hermite_poly,
                     inner_product, laguerre_poly, laguerre_wigner)
from stargen.special import (LAGUERRE_CALIBRATION, calibrate_laguerre, laguerre_closed_form,
                             laguerre_wigner_conj)

X = sp.Symbol("x")


def rodrigues_hermite(k, x):
    expr = (-1) ** k * sp.exp(X ** 2) * sp.diff(sp.exp(-X ** 2), X, k)
    return float(sp.simplify(expr).subs(X, x))


def rodrigues_laguerre(j, k, x):
    expr = X ** (-k) * sp.exp(X) * sp.diff(sp.exp(-X) * X ** (j + k), X, j) / sp.factorial(j)
    return float(sp.simplify(expr).subs(X, x))


def test_hermite_small_values():
    assert hermite_poly(0, 3.7) == 1.0
    assert hermite_poly(1, 0.5) == 1.0
    assert hermite_poly(2, 1.0) == 2.0


def test_laguerre_small_values():
    assert laguerre_poly(0, 3, 1.7) == 1.0
    assert laguerre_poly(1, 0, 2.0) == -1.0
    assert laguerre_poly(1, 1, 1.0) == 1.0


@pytest.mark.parametrize("k", range(9))
def test_hermite_matches_rodrigues(k):
    for x in (-2, -1, 0, 1, 2):
        ref = rodrigues_hermite(k, x)
        assert math.isclose(hermite_poly(k, float(x)), ref, rel_tol=1e-10, abs_tol=1e-10)


@pytest.mark.parametrize("j", range(9))
def test_laguerre_matches_rodrigues(j):
    for k in (0, 1, 3):
        for x in (0.5, 1, 2):          # Laguerre polynomials live on x >= 0
            ref = rodrigues_laguerre(j, k, x)
            assert math.isclose(laguerre_poly(j, k, float(x)), ref, rel_tol=1e-10, abs_tol=1e-10)


def test_laguerre_rejects_negative_argument():
    with pytest.raises(DomainError):
        laguerre_poly(2, 1, -0.1)


@pytest.mark.parametrize("bad", [-1, 65, 2.5])
def test_index_guard(bad):
    with pytest.raises(DomainError):
        hermite_poly(bad, 0.0)


def test_normalization_is_finite_at_large_index():
    assert 0 < hermite_normalization(64) < 1e-40
    assert math.isclose(hermite_normalization(3), (8 * 6 * math.sqrt(math.pi)) ** -0.5, rel_tol=1e-14)


def test_hermite_function_value_at_origin():
    g = SpatialGrid.centered(4.0, 8)
    assert math.isclose(hermite_function(0, g).values[4].real, math.pi ** -0.25, rel_tol=1e-15)


def test_hermite_function_matches_closed_form():
    g = SpatialGrid.centered(6.0, 64)
    x = g.points
    for k in range(6):
        ref = hermite_normalization(k) * np.exp(-x * x / 2) * hermite_poly(k, x)
        assert np.max(np.abs(hermite_function(k, g).values - ref)) < 1e-13


@pytest.mark.parametrize("hbar", [1.0, 0.3])
def test_hermite_functions_orthonormal(hbar):
    g = SpatialGrid.centered(10.0, 256)
    fs = [hermite_function(k, g, hbar) for k in range(11)]
    gram = np.array([[inner_product(a, b) for b in fs] for a in fs])
    assert np.max(np.abs(gram - np.eye(11))) < 1e-10


def test_high_index_stays_normalized():
    g = SpatialGrid.centered(16.0, 512)
    assert abs(hermite_function(60, g).norm() - 1) < 1e-10


# ------------------------------------------------------------ Laguerre form

@pytest.fixture(scope="module")
def lgrid():
    return PhaseGrid.compatible(SpatialGrid.centered(10.0, 128))


def test_ground_state_closed_form(lgrid):
    X_, P_ = lgrid.mesh()
    ref = math.sqrt(2 / math.pi) * np.exp(-(X_ ** 2 + P_ ** 2))
    assert np.max(np.abs(laguerre_wigner(0, 0, lgrid).values - ref)) < 1e-15


def test_calibration_constant_is_uniform(lgrid):
    for j in range(4):
        for k in range(4):
            ratio, spread = calibrate_laguerre(j, k, lgrid)
            assert abs(ratio - LAGUERRE_CALIBRATION) < 1e-9
            assert spread < 1e-6


def test_closed_form_agrees_with_quadrature(lgrid):
    for j in range(4):
        for k in range(7 - j):
            t = WindowedTransform.hermite(j, lgrid)
            w = cross_wigner(t, hermite_function(j + k, lgrid.x_axis))
            assert (w - laguerre_wigner(j, k, lgrid)).max_abs() < 1e-8


def test_conjugate_pair(lgrid):
    for j, k in [(0, 2), (1, 1), (2, 3)]:
        t = WindowedTransform.hermite(j + k, lgrid)
        w = cross_wigner(t, hermite_function(j, lgrid.x_axis))
        assert (w - laguerre_wigner_conj(j, k, lgrid)).max_abs() < 1e-10


def test_calibrated_norm(lgrid):
    for j, k in [(0, 0), (1, 2), (3, 1)]:
        assert abs(laguerre_wigner(j, k, lgrid).norm() - 1) < 1e-8


def test_wrong_window_is_not_a_constant_multiple(lgrid):
    # the other labelling of the window gives a ratio that varies over z
    _, spread = calibrate_laguerre(0, 1, lgrid, window=1)
    assert spread > 1e-2


def test_closed_form_needs_unit_hbar():
    g = PhaseGrid.compatible(SpatialGrid.centered(6.0, 32), hbar=0.5)
    with pytest.raises(UnsupportedError):
        laguerre_closed_form(0, 0, g)
