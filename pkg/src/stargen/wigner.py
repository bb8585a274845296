"""Cross-Wigner transform, its adjoint and the associated projection.

The transform with window ``phi`` is

    W_phi psi(x, p) = (2 pi hbar)^{-1/2} \\int e^{-i p y / hbar}
                      psi(x + y/2) conj(phi(x - y/2)) dy.

``psi`` and ``phi`` are Fourier-interpolated onto the half-spaced grid so
that ``x_i +- y_n / 2`` with ``y_n = n dx`` always lands on a sample.  The
y-sum is a dense matrix product against the requested momenta, so the
momentum axis can be any centered lattice; on a compatible grid it is the
usual DFT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, GridMismatchError
from .grids import (PhaseField, PhaseGrid, WaveField,
                    inner_product, refine, refinement_matrix)
from .special import hermite_function

NORM_TOL = 1e-10


@lru_cache(maxsize=16)
def _pair_indices(n: int):
    """Fine-grid indices ``2i + m`` and ``2i - m`` for ``m in [-n, n)``."""
    i = np.arange(n)[:, None]
    m = np.arange(-n, n)[None, :]
    plus, minus = 2 * i + m, 2 * i - m
    valid = (plus >= 0) & (plus < 2 * n) & (minus >= 0) & (minus < 2 * n)
    plus = np.where(valid, plus, 2 * n)     # slot 2n holds a zero
    minus = np.where(valid, minus, 2 * n)
    for a in (plus, minus):
        a.flags.writeable = False
    return plus, minus


@lru_cache(maxsize=16)
def _lag_transform(grid: PhaseGrid) -> np.ndarray:
    """``E[m, b] = exp(-i p_b m dx / hbar)`` for lags ``m in [-n, n)``."""
    n = grid.x_axis.n_points
    lags = np.arange(-n, n) * grid.dx
    mat = np.exp(-1j * np.outer(lags, grid.p_axis.points) / grid.hbar)
    mat.flags.writeable = False
    return mat


def _padded_fine(values: np.ndarray) -> np.ndarray:
    fine = refine(np.asarray(values, dtype=complex))
    return np.concatenate([fine, [0.0]])


def lag_products(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``F[i, m] = a(x_i + m dx/2) conj(b(x_i - m dx/2))``, zero off the window."""
    plus, minus = _pair_indices(a.shape[0])
    af, bf = _padded_fine(a), _padded_fine(b)
    return af[plus] * np.conj(bf[minus])


def lag_fourier(lagged: np.ndarray, grid: PhaseGrid) -> np.ndarray:
    """``dx * sum_m exp(-i p m dx/hbar) F[i, m]`` for every grid momentum."""
    return (lagged @ _lag_transform(grid)) * grid.dx


def _scaled_cross(psi: np.ndarray, phi: np.ndarray, grid: PhaseGrid) -> np.ndarray:
    c = (2 * math.pi * grid.hbar) ** -0.5
    return c * lag_fourier(lag_products(psi, phi), grid)


def wigner_distribution(psi: WaveField, phi: WaveField, grid: PhaseGrid) -> PhaseField:
    """Unscaled ``W(psi, phi)`` with prefactor ``(2 pi hbar)^{-1}``; any norms."""
    _check_pair(psi, phi, grid)
    vals = _scaled_cross(psi.values, phi.values, grid)
    return PhaseField(grid, vals * (2 * math.pi * grid.hbar) ** -0.5)


def _check_pair(psi: WaveField, phi: WaveField, grid: PhaseGrid) -> None:
    if psi.grid != grid.x_axis or phi.grid != grid.x_axis:
        raise GridMismatchError("wave fields must live on the x-axis of the phase grid")


@dataclass(frozen=True)
class WindowedTransform:
    """The map ``psi -> W_phi psi`` for a fixed unit-norm window."""

    window: WaveField
    target: PhaseGrid

    def __post_init__(self):
        if self.window.grid != self.target.x_axis:
            raise GridMismatchError("window grid differs from the x-axis of the target grid")
        nrm = self.window.norm()
        if abs(nrm - 1.0) > NORM_TOL:
            raise ConfigurationError(f"window must have unit norm, got {nrm:.12g}")

    @property
    def hbar(self) -> float:
        return self.target.hbar

    @classmethod
    def hermite(cls, index: int, grid: PhaseGrid) -> "WindowedTransform":
        return cls(hermite_function(index, grid.x_axis, grid.hbar), grid)


def cross_wigner(t: WindowedTransform, psi: WaveField) -> PhaseField:
    """``W_phi psi``; isometric from L2(R) into L2(R^2)."""
    if psi.grid != t.target.x_axis:
        raise GridMismatchError("psi does not live on the window grid")
    return PhaseField(t.target, _scaled_cross(psi.values, t.window.values, t.target))


def wigner_adjoint(t: WindowedTransform, big_psi: PhaseField) -> WaveField:
    """Exact adjoint of the discrete ``cross_wigner`` for the grid inner products."""
    grid = t.target
    if big_psi.grid != grid:
        raise GridMismatchError("field does not live on the target grid")
    n = grid.x_axis.n_points
    g = big_psi.values @ np.conj(_lag_transform(grid)).T      # (n, 2n)
    plus, minus = _pair_indices(n)
    phif = _padded_fine(t.window.values)
    contrib = phif[minus] * g
    h = np.zeros(2 * n + 1, dtype=complex)
    np.add.at(h, plus.ravel(), contrib.ravel())
    r = refinement_matrix(n)
    c = (2 * math.pi * grid.hbar) ** -0.5 * grid.dx
    return WaveField(grid.x_axis, c * grid.dp * (np.conj(r).T @ h[:2 * n]))


def adjoint_quadrature(t: WindowedTransform, big_psi: PhaseField) -> WaveField:
    """Adjoint by direct quadrature of its closed form, on-grid nodes only.

    ``(2/(pi hbar))^{1/2} sum e^{2ip(x-y)/hbar} phi(2y - x) Psi(y, p) dy dp``;
    ``2y - x`` is a node whenever ``x`` and ``y`` are, so no interpolation
    enters.  Used to cross-check ``wigner_adjoint``.
    """
    grid = t.target
    n = grid.x_axis.n_points
    x = grid.x_axis.points
    p = grid.p_axis.points
    phi = t.window.values
    out = np.zeros(n, dtype=complex)
    for i in range(n):
        idx = 2 * np.arange(n) - i
        ok = (idx >= 0) & (idx < n)
        phi_col = np.where(ok, phi[np.clip(idx, 0, n - 1)], 0.0)
        phase = np.exp(2j * np.outer(x[i] - x, p) / grid.hbar)
        out[i] = np.sum(phase * phi_col[:, None] * big_psi.values)
    pref = math.sqrt(2 / (math.pi * grid.hbar)) * grid.cell
    return WaveField(grid.x_axis, pref * out)


def projection(t: WindowedTransform, big_psi: PhaseField) -> PhaseField:
    """``P_phi = W_phi W_phi^*``, orthogonal projection onto the range of ``W_phi``."""
    return cross_wigner(t, wigner_adjoint(t, big_psi))


def moyal_identity_check(psi: WaveField, psi2: WaveField, phi: WaveField,
                         phi2: WaveField, grid: PhaseGrid) -> tuple[complex, complex]:
    """Both sides of ``(W(psi,phi)|W(psi',phi')) = (psi|psi') conj((phi|phi')) / (2 pi hbar)``."""
    w1 = wigner_distribution(psi, phi, grid)
    w2 = wigner_distribution(psi2, phi2, grid)
    lhs = inner_product(w1, w2)
    rhs = inner_product(psi, psi2) * np.conj(inner_product(phi, phi2)) / (2 * math.pi * grid.hbar)
    return lhs, complex(rhs)


def basis_field(j: int, k: int, grid: PhaseGrid) -> PhaseField:
    """``Phi_{j,k} = W_{phi_j} phi_k``: window ``j``, analyzed function ``k``."""
    phi_j = hermite_function(j, grid.x_axis, grid.hbar)
    phi_k = hermite_function(k, grid.x_axis, grid.hbar)
    return PhaseField(grid, _scaled_cross(phi_k.values, phi_j.values, grid))


def stargen_basis(j: int, k: int, grid: PhaseGrid) -> PhaseField:
    """``Psi_{j,k} = W_{psi_k} psi_j``: analyzed function ``j``, window ``k``.

    For the oscillator this is a star-genfunction with eigenvalue
    ``(j + 1/2) hbar``.
    """
    return basis_field(k, j, grid)


def gaussian_wigner(grid: PhaseGrid) -> PhaseField:
    """``W_{psi_0} psi_0 = sqrt(2/pi) exp(-|z|^2/hbar)`` (for unit hbar)."""
    h = grid.hbar
    c = math.sqrt(2 / math.pi) / math.sqrt(h)     # (2 pi h)^{1/2} / (pi h)
    return PhaseField.from_function(grid, lambda x, p: c * np.exp(-(x * x + p * p) / h))
