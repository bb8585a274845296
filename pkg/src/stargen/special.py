"""Hermite and Laguerre functions for the harmonic oscillator.

All polynomial evaluations use three-term recurrences, which are stable in
the forward direction for the index range supported here (``<= 64``).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, UnsupportedError
from .grids import PhaseField, PhaseGrid, SpatialGrid, WaveField

MAX_INDEX = 64

# Ratio between W_{psi_j} psi_{j+k} and the Laguerre closed form below.
# Measured by quadrature (see ``calibrate_laguerre``); identical for every
# (j, k) that was tried, and equal to 1/sqrt(2 pi) to machine precision.
LAGUERRE_CALIBRATION = 1.0 / math.sqrt(2.0 * math.pi)


def _check_index(k: int, name: str = "k") -> int:
    if int(k) != k or k < 0:
        raise DomainError(f"{name} must be a non-negative integer, got {k}")
    if k > MAX_INDEX:
        raise DomainError(f"{name} must be <= {MAX_INDEX}, got {k}")
    return int(k)


def hermite_poly(k: int, x):
    """Physicists' Hermite polynomial ``H_k(x)``."""
    k = _check_index(k)
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if k == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2 * x
    for n in range(1, k):
        h_prev, h = h, 2 * x * h - 2 * n * h_prev
    return h if h.ndim else float(h)


def laguerre_poly(j: int, k: int, x):
    """Generalized Laguerre polynomial ``L_j^k(x)`` for ``x >= 0``."""
    j = _check_index(j, "j")
    k = _check_index(k, "k")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("Laguerre polynomials are evaluated for x >= 0 only")
    l_prev = np.ones_like(x)
    if j == 0:
        return l_prev if l_prev.ndim else float(l_prev)
    l_cur = 1 + k - x
    for n in range(1, j):
        l_prev, l_cur = l_cur, ((2 * n + k + 1 - x) * l_cur
                                - (n + k) * l_prev) / (n + 1)
    return l_cur if l_cur.ndim else float(l_cur)


def _hermite_function_values(k: int, x: np.ndarray) -> np.ndarray:
    # normalized recurrence: no factorials, no overflow
    # psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1}
    psi_prev = np.pi ** -0.25 * np.exp(-x * x / 2)
    if k == 0:
        return psi_prev
    psi = math.sqrt(2.0) * x * psi_prev
    for n in range(1, k):
        psi_prev, psi = psi, (math.sqrt(2.0 / (n + 1)) * x * psi
                              - math.sqrt(n / (n + 1)) * psi_prev)
    return psi


def hermite_normalization(k: int) -> float:
    """``(2^k k! sqrt(pi))^{-1/2}``, evaluated in log space."""
    k = _check_index(k)
    log_norm = -0.5 * (k * math.log(2.0) + gammaln(k + 1) + 0.5 * math.log(math.pi))
    return math.exp(log_norm)


def hermite_function(k: int, grid: SpatialGrid, hbar: float = 1.0) -> WaveField:
    """Oscillator eigenfunction ``psi_k`` sampled on ``grid``.

    For ``hbar != 1`` this is ``hbar^{-1/4} psi_k(x / sqrt(hbar))``, which is
    unit-norm and has energy ``(k + 1/2) hbar`` for ``H = (p^2 + x^2)/2``.
    """
    k = _check_index(k)
    if not hbar > 0:
        raise DomainError("hbar must be positive")
    s = math.sqrt(hbar)
    vals = _hermite_function_values(k, grid.points / s) / math.sqrt(s)
    return WaveField(grid, vals)


def laguerre_closed_form(j: int, k: int, grid: PhaseGrid) -> PhaseField:
    """Uncalibrated Laguerre expression, ``hbar = 1``.

    ``(-1)^j sqrt(j!/(j+k)!) 2^{k/2+1} conj(zeta)^k L_j^k(2|z|^2) e^{-|z|^2}``
    with ``zeta = x + i p``.
    """
    j = _check_index(j, "j")
    k = _check_index(k, "k")
    if grid.hbar != 1.0:
        raise UnsupportedError("the Laguerre closed form is only available at hbar = 1")
    X, P = grid.mesh()
    r2 = X * X + P * P
    log_pref = 0.5 * (gammaln(j + 1) - gammaln(j + k + 1)) + (k / 2 + 1) * math.log(2.0)
    zeta_bar = X - 1j * P
    vals = ((-1) ** j * math.exp(log_pref) * zeta_bar ** k
            * laguerre_poly(j, k, 2 * r2) * np.exp(-r2))
    return PhaseField(grid, vals)


def laguerre_wigner(j: int, k: int, grid: PhaseGrid) -> PhaseField:
    """Closed form of ``W_{psi_j} psi_{j+k}`` at ``hbar = 1``.

    The analyzed function is ``psi_{j+k}``, the window ``psi_j``.  The
    complex conjugate is ``W_{psi_{j+k}} psi_j``, see ``laguerre_wigner_conj``.
    """
    return laguerre_closed_form(j, k, grid) * LAGUERRE_CALIBRATION


def laguerre_wigner_conj(j: int, k: int, grid: PhaseGrid) -> PhaseField:
    """``W_{psi_{j+k}} psi_j``, the conjugate of ``laguerre_wigner(j, k)``."""
    return laguerre_wigner(j, k, grid).conj()


def calibrate_laguerre(j: int, k: int, grid: PhaseGrid,
                       window: int | None = None,
                       threshold: float = 1e-6) -> tuple[complex, float]:
    """Measure ``W_{psi_window} psi_{j+k} / closed_form(j, k)`` by quadrature.

    Returns the mean ratio over points where the closed form exceeds
    ``threshold`` and the relative spread ``std / |mean|``.  A spread near
    machine precision means the closed form is right up to the constant.
    ``window`` defaults to ``j``.
    """
    from .wigner import WindowedTransform, cross_wigner

    if window is None:
        window = j
    closed = laguerre_closed_form(j, k, grid).values
    phi = hermite_function(window, grid.x_axis, grid.hbar)
    psi = hermite_function(j + k, grid.x_axis, grid.hbar)
    w = cross_wigner(WindowedTransform(phi, grid), psi).values
    mask = np.abs(closed) > threshold
    if not np.any(mask):
        raise DomainError("closed form is below threshold everywhere on the grid")
    ratio = w[mask] / closed[mask]
    mean = complex(np.mean(ratio))
    spread = float(np.std(ratio) / abs(mean)) if mean != 0 else float("inf")
    return mean, spread
