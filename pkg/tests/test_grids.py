import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stargen import (ConfigurationError, GridMismatchError, PhaseField, PhaseGrid, SpatialGrid,
                     SymplecticVector, WaveField, hermite_function, inner_product,
                     symplectic_form, symplectic_fourier)
from stargen.grids import refine, refinement_matrix, shift_with_zero_fill, spectral_derivative
from stargen.verify import band_limited_field

finite = st.floats(-1e3, 1e3, allow_nan=False)
vectors = st.builds(SymplecticVector, finite, finite)


# --------------------------------------------------------------- grids

def test_spatial_grid_points_and_spacing():
    g = SpatialGrid(-2.0, 2.0, 8)
    assert g.dx == 0.5
    assert np.allclose(g.points, -2.0 + 0.5 * np.arange(8))
    assert g.is_centered


@pytest.mark.parametrize("args", [(1.0, 0.0, 8), (0.0, 1.0, 7), (0.0, 1.0, 6), (0.0, float("inf"), 8)])
def test_spatial_grid_rejects_bad_parameters(args):
    with pytest.raises(ConfigurationError):
        SpatialGrid(*args)


def test_phase_grid_must_be_centered():
    with pytest.raises(ConfigurationError):
        PhaseGrid(SpatialGrid(0.0, 4.0, 8), SpatialGrid(-2.0, 2.0, 8))


def test_compatible_grid_pairing():
    g = PhaseGrid.compatible(SpatialGrid.centered(5.0, 32), hbar=0.7)
    assert math.isclose(g.dx * g.dp, 2 * math.pi * 0.7 / 32, rel_tol=1e-14)
    assert g.is_compatible
    assert not PhaseGrid.square(5.0, 32).is_compatible
    sq = PhaseGrid.compatible_square(16)
    assert sq.is_compatible and sq.dx == sq.dp


def test_fields_are_immutable(grid64):
    f = PhaseField.constant(grid64, 2.0)
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0


def test_field_grid_mismatch(grid64, grid128):
    with pytest.raises(GridMismatchError):
        PhaseField.zeros(grid64) + PhaseField.zeros(grid128)
    with pytest.raises(GridMismatchError):
        inner_product(PhaseField.zeros(grid64), PhaseField.zeros(grid128))


# ------------------------------------------------------- symplectic form

def test_symplectic_form_hand_value():
    assert symplectic_form(SymplecticVector(1, 2), SymplecticVector(3, 4)) == 2.0


@given(vectors, vectors)
def test_symplectic_form_antisymmetric(z, w):
    assert symplectic_form(z, z) == 0.0
    assert symplectic_form(z, w) == -symplectic_form(w, z)


@given(vectors, vectors, vectors, st.floats(-10, 10))
def test_symplectic_form_bilinear(z, w, u, c):
    lhs = symplectic_form(z.scaled(c) + w, u)
    rhs = c * symplectic_form(z, u) + symplectic_form(w, u)
    assert math.isclose(lhs, rhs, rel_tol=1e-9, abs_tol=1e-6)


# --------------------------------------------------------- inner product

def test_ground_state_unit_norm():
    g = SpatialGrid.centered(10.0, 128)
    psi = hermite_function(0, g)
    assert abs(inner_product(psi, psi) - 1) < 1e-10


@given(st.integers(0, 2 ** 31))
def test_inner_product_conjugate_symmetry(seed):
    r = np.random.default_rng(seed)
    g = SpatialGrid.centered(4.0, 16)
    a = WaveField(g, r.normal(size=16) + 1j * r.normal(size=16))
    b = WaveField(g, r.normal(size=16) + 1j * r.normal(size=16))
    assert np.isclose(inner_product(a, b), np.conj(inner_product(b, a)), rtol=1e-13)
    assert inner_product(a, WaveField.zeros(g)) == 0
    # conjugate-linear in the second slot
    assert np.isclose(inner_product(a, b * 1j), -1j * inner_product(a, b), rtol=1e-13)


# ------------------------------------------------- symplectic Fourier

def test_fourier_requires_compatible_grid():
    with pytest.raises(ConfigurationError):
        symplectic_fourier(PhaseField.zeros(PhaseGrid.square(5.0, 32)))


@given(st.integers(0, 2 ** 31), st.sampled_from([16, 32, 64]), st.sampled_from([1.0, 0.5]))
def test_fourier_involution_and_unitarity(seed, n, hbar):
    grid = PhaseGrid.compatible_square(n, hbar)
    f = band_limited_field(grid, np.random.default_rng(seed))
    ff = symplectic_fourier(f)
    assert (symplectic_fourier(ff) - f).norm() <= 1e-12 * f.norm()
    assert abs(ff.norm() - f.norm()) <= 1e-12 * f.norm()


def test_fourier_gaussian_fixed_point():
    for hbar in (1.0, 0.25):
        grid = PhaseGrid.compatible_square(128, hbar)
        g0 = PhaseField.from_function(grid, lambda x, p: np.exp(-(x * x + p * p) / (2 * hbar)))
        assert (symplectic_fourier(g0) - g0).max_abs() < 1e-12


def test_fourier_of_zero(grid64):
    assert symplectic_fourier(PhaseField.zeros(grid64)).max_abs() == 0.0


def test_fourier_plane_wave_gives_point_mass():
    # exp(i sigma(z', w)/hbar) = exp(-i sigma(w, z')/hbar), so the transform sits at z = -w
    grid = PhaseGrid.compatible_square(32)
    w = SymplecticVector(3 * grid.dx, -2 * grid.dp)
    f = PhaseField.from_function(grid, lambda x, p: np.exp(1j * (p * w.x - w.p * x)))
    out = np.abs(symplectic_fourier(f).values)
    i, b = np.unravel_index(np.argmax(out), out.shape)
    assert (grid.x_axis.points[i], grid.p_axis.points[b]) == pytest.approx((-w.x, -w.p))
    assert np.sum(out > 1e-9 * out.max()) == 1


# ------------------------------------------------------------- helpers

def test_refinement_reproduces_band_limited_samples():
    n = 32
    g = SpatialGrid.centered(4.0, n)
    f = np.exp(-g.points ** 2)
    fine = refine(f)
    assert np.allclose(fine[::2], f, atol=1e-14)
    xf = g.x_min + 0.5 * g.dx * np.arange(2 * n)
    assert np.max(np.abs(fine - np.exp(-xf ** 2))) < 1e-6
    r = refinement_matrix(n)
    assert np.allclose(r.conj().T @ r, 2 * np.eye(n), atol=1e-12)


def test_spectral_derivative_of_gaussian():
    g = SpatialGrid.centered(8.0, 64)
    x = g.points
    d = spectral_derivative(np.exp(-x * x), g.dx)
    assert np.max(np.abs(d + 2 * x * np.exp(-x * x))) < 1e-12


def test_shift_with_zero_fill():
    v = np.arange(6.0)
    assert list(shift_with_zero_fill(v, (2,), (0,))) == [0, 0, 0, 1, 2, 3]
    assert list(shift_with_zero_fill(v, (-1,), (0,))) == [1, 2, 3, 4, 5, 0]
