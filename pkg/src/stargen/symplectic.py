"""Symplectic linear algebra, metaplectic generators and phase-space checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import sympy as sp
from scipy.interpolate import RegularGridInterpolator
from scipy.linalg import block_diag, schur, sqrtm

from .errors import DomainError, UnsupportedError
from .grids import PhaseField, PhaseGrid, SpatialGrid, WaveField
from .wigner import WindowedTransform, cross_wigner, projection, wigner_distribution

MAX_MODES = 8


def symplectic_matrix(n: int) -> np.ndarray:
    """``J = [[0, I], [-I, 0]]`` in (x_1..x_n, p_1..p_n) ordering."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass(frozen=True, eq=False)
class SymplecticDecomposition:
    """``M = S^T D S`` with ``D = diag(omegas, omegas)`` and ``S`` symplectic."""

    S: np.ndarray
    omegas: np.ndarray

    @property
    def D(self) -> np.ndarray:
        return np.diag(np.concatenate([self.omegas, self.omegas]))


def check_spd(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise DomainError("expected a square matrix of even size")
    if m.shape[0] > 2 * MAX_MODES:
        raise DomainError(f"at most {MAX_MODES} degrees of freedom are supported")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix entries must be finite")
    scale = max(np.max(np.abs(m)), 1e-300)
    if np.max(np.abs(m - m.T)) > 1e-12 * scale:
        raise DomainError("matrix is not symmetric")
    if np.min(np.linalg.eigvalsh(m)) <= 0:
        raise DomainError("matrix is not positive definite")
    return 0.5 * (m + m.T)


def williamson(m) -> SymplecticDecomposition:
    """Williamson normal form of a symmetric positive-definite ``2n x 2n`` matrix.

    ``M^{-1/2} J M^{-1/2}`` is antisymmetric, so its real Schur form is made
    of 2x2 blocks ``[[0, w], [-w, 0]]`` with ``w = 1/omega``; the Schur basis
    then yields ``S``.  Modes are sorted by increasing ``omega``.
    """
    m = check_spd(m)
    n = m.shape[0] // 2
    j = symplectic_matrix(n)
    m_inv_half = np.real(sqrtm(np.linalg.inv(m)))
    m_inv_half = 0.5 * (m_inv_half + m_inv_half.T)
    t, k = schur(m_inv_half @ j @ m_inv_half, output="real")
    # make every block read [[0, w], [-w, 0]] with w > 0
    flips = [np.eye(2) if t[2 * i, 2 * i + 1] > 0 else np.array([[0.0, 1.0], [1.0, 0.0]])
             for i in range(n)]
    p = block_diag(*flips)
    k = k @ p
    t = p @ t @ p
    w = np.array([t[2 * i, 2 * i + 1] for i in range(n)])
    order = np.argsort(-w)                     # large w = small omega first
    w = w[order]
    cols = np.concatenate([2 * order, 2 * order + 1])  # x-like then p-like
    k = k[:, cols]
    omegas = 1.0 / w
    # with K^T M^{-1/2} J M^{-1/2} K = [[0, W], [-W, 0]], W = diag(w):
    # S^{-1} = M^{-1/2} K diag(W, W)^{-1/2}
    s_inv = m_inv_half @ k @ np.diag(np.concatenate([w, w]) ** -0.5)
    s = np.linalg.inv(s_inv)
    return SymplecticDecomposition(s, omegas)


def symplectic_eigenvalues(m) -> np.ndarray:
    """``|Im|`` of the eigenvalues of ``J M`` (each appears twice), ascending, one per mode."""
    m = check_spd(m)
    n = m.shape[0] // 2
    ev = np.linalg.eigvals(symplectic_matrix(n) @ m)
    im = np.sort(np.abs(ev.imag))
    return im[::2]


def quadratic_spectrum(m, multi_indices: Sequence[Sequence[int]],
                       hbar: float = 1.0) -> list[float]:
    """``sum_j (N_j + 1/2) hbar omega_j`` for each multi-index."""
    dec = williamson(m)
    out = []
    for idx in multi_indices:
        idx = tuple(int(i) for i in idx)
        if len(idx) != len(dec.omegas) or min(idx) < 0:
            raise DomainError(f"multi-index {idx} does not match {len(dec.omegas)} modes")
        out.append(float(np.sum((np.array(idx) + 0.5) * hbar * dec.omegas)))
    return out


# ------------------------------------------------------------ metaplectic

Generator = tuple  # ("J",), ("scale", a) or ("shear", c)


def _band_limited_eval(psi: WaveField, points: np.ndarray) -> np.ndarray:
    """Trigonometric interpolant of ``psi`` evaluated at arbitrary ``points``."""
    g = psi.grid
    n = g.n_points
    coeffs = np.fft.fft(psi.values) / n
    k = np.fft.fftfreq(n, d=g.dx) * 2 * np.pi
    k[n // 2] = 0.0           # drop the ambiguous Nyquist mode
    coeffs = coeffs.copy()
    coeffs[n // 2] = 0.0
    t = (np.asarray(points) - g.x_min)
    out = np.exp(1j * np.outer(t, k)) @ coeffs
    outside = (points < g.x_min) | (points >= g.x_max)
    return np.where(outside, 0.0, out)


def _generator_matrix(gen: Generator) -> np.ndarray:
    name = gen[0]
    if name == "J":
        return np.array([[0.0, 1.0], [-1.0, 0.0]])
    if name == "scale":
        a = float(gen[1])
        if a <= 0:
            raise DomainError("scale factor must be positive")
        return np.diag([a, 1 / a])
    if name == "shear":
        return np.array([[1.0, 0.0], [float(gen[1]), 1.0]])
    raise UnsupportedError(f"unsupported generator {gen!r}")


def _apply_generator(gen: Generator, psi: WaveField, hbar: float) -> WaveField:
    g = psi.grid
    x = g.points
    name = gen[0]
    if name == "J":
        # Fourier transform; the constant phase of the metaplectic lift cancels
        kernel = np.exp(-1j * np.outer(x, x) / hbar)
        vals = kernel @ psi.values * g.dx / math.sqrt(2 * math.pi * hbar)
    elif name == "scale":
        a = float(gen[1])
        vals = _band_limited_eval(psi, x / a) / math.sqrt(a)
    elif name == "shear":
        c = float(gen[1])
        vals = np.exp(0.5j * c * x * x / hbar) * psi.values
    else:
        raise UnsupportedError(f"unsupported generator {gen!r}")
    return WaveField(g, vals)


def compose_word(word: Sequence[Generator]) -> np.ndarray:
    """Symplectic matrix of the word; the first generator acts first."""
    s = np.eye(2)
    for gen in word:
        s = _generator_matrix(gen) @ s
    return s


def metaplectic_apply(word: Sequence[Generator], psi: WaveField, hbar: float = 1.0) -> WaveField:
    for gen in word:
        _generator_matrix(gen)
        psi = _apply_generator(gen, psi, hbar)
    return psi


def symplectic_covariance_check(word: Sequence[Generator], psi: WaveField, phi: WaveField,
                                grid: PhaseGrid, interior: float = 0.8) -> float:
    """``max |W(S psi, S phi)(z) - W(psi, phi)(S^{-1} z)|`` over interior nodes.

    ``W(psi, phi)`` at ``S^{-1} z`` is bilinearly interpolated from its
    values on ``grid``; nodes whose preimage leaves the grid are skipped.
    """
    s = compose_word(word)
    w0 = wigner_distribution(psi, phi, grid).values
    w1 = wigner_distribution(metaplectic_apply(word, psi, grid.hbar),
                             metaplectic_apply(word, phi, grid.hbar), grid).values
    xs, ps = grid.x_axis.points, grid.p_axis.points
    X, P = grid.mesh()
    pre = np.linalg.solve(s, np.stack([X.ravel(), P.ravel()]))
    inside = ((np.abs(X.ravel()) <= interior * grid.x_axis.x_max)
              & (np.abs(P.ravel()) <= interior * grid.p_axis.x_max)
              & (pre[0] >= xs[0]) & (pre[0] <= xs[-1])
              & (pre[1] >= ps[0]) & (pre[1] <= ps[-1]))
    if not np.any(inside):
        return 0.0
    interp = RegularGridInterpolator((xs, ps), w0, method="linear")
    ref = interp(pre[:, inside].T)
    return float(np.max(np.abs(w1.ravel()[inside] - ref)))


# ---------------------------------------------------- closed-form checks

def continuous_spectrum_check(case: str, energy: float, grid: PhaseGrid,
                              profile: Callable | None = None,
                              wrong_sign: bool = False) -> float:
    """Residual of the closed-form star-genfunctions of ``H = p`` and ``H = x``.

    ``momentum``: ``Psi = Phi(p) e^{2i(E - p)x/hbar}`` in ``(p - i hbar/2 d_x) Psi - E Psi``;
    ``position``: ``Psi = Phi(x) e^{-2i(E - x)p/hbar}`` in ``(x + i hbar/2 d_p) Psi - E Psi``.
    Derivatives are taken symbolically; ``profile`` maps a sympy symbol to a
    sympy expression (a unit Gaussian by default).
    """
    x, p = sp.symbols("x p", real=True)
    hbar = sp.nsimplify(grid.hbar)
    e = sp.nsimplify(energy)
    if profile is None:
        def profile(s):
            return sp.exp(-s ** 2 / 2)
    sgn = -1 if wrong_sign else 1
    if case == "momentum":
        psi = profile(p) * sp.exp(sgn * 2 * sp.I * (e - p) * x / hbar)
        res = p * psi - sp.I * hbar / 2 * sp.diff(psi, x) - e * psi
    elif case == "position":
        psi = profile(x) * sp.exp(-sgn * 2 * sp.I * (e - x) * p / hbar)
        res = x * psi + sp.I * hbar / 2 * sp.diff(psi, p) - e * psi
    else:
        raise UnsupportedError(f"unknown case {case!r}; use 'momentum' or 'position'")
    fn = sp.lambdify((x, p), res, "numpy")
    X, P = grid.mesh()
    vals = np.broadcast_to(fn(X, P), X.shape)
    return float(np.max(np.abs(vals)))


def squeezed_gaussian(s: float, grid: SpatialGrid, hbar: float = 1.0) -> WaveField:
    """Unit-norm ``(pi hbar)^{-1/4} s^{-1/2} exp(-x^2 / (2 s^2 hbar))``."""
    x = grid.points
    return WaveField(grid, (math.pi * hbar) ** -0.25 / math.sqrt(s)
                     * np.exp(-x * x / (2 * s * s * hbar)))


@dataclass(frozen=True)
class DecayFit:
    s_psi: float
    s_phi: float
    a: float
    b: float
    fit_residual: float

    @property
    def product(self) -> float:
        return self.a * self.b


def admissible_decay(a: float, b: float, tol: float = 1e-9) -> bool:
    """A nonzero ``W_phi psi`` cannot decay like ``exp(-(a x^2 + b p^2)/hbar)`` with ``ab > 1``."""
    return a * b <= 1 + tol


def fit_gaussian_decay(field: PhaseField, floor: float = 1e-8,
                       max_residual: float = 1e-4) -> tuple[float, float, float]:
    """Least-squares fit ``log|F| = c - (a x^2 + b p^2)/hbar`` on points above ``floor * max``."""
    X, P = field.grid.mesh()
    mag = np.abs(field.values)
    mask = mag > floor * mag.max()
    h = field.grid.hbar
    design = np.stack([np.ones(mask.sum()), -X[mask] ** 2 / h, -P[mask] ** 2 / h], axis=1)
    target = np.log(mag[mask])
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    resid = float(np.max(np.abs(design @ coef - target)))
    if resid > max_residual:
        raise UnsupportedError(f"field is not a centered Gaussian (log-fit residual {resid:.2e})")
    return float(coef[1]), float(coef[2]), resid


def gaussian_decay_check(widths: Sequence[float], grid: PhaseGrid,
                         mixed: bool = True) -> list[DecayFit]:
    """Fit the decay rates of ``W_phi psi`` for squeezed Gaussian pairs.

    Matched pairs use ``psi = phi``; with ``mixed`` every ordered pair of
    distinct widths is added as well.
    """
    pairs = [(s, s) for s in widths]
    if mixed:
        pairs += [(s1, s2) for s1 in widths for s2 in widths if s1 != s2]
    out = []
    for s1, s2 in pairs:
        psi = squeezed_gaussian(s1, grid.x_axis, grid.hbar)
        phi = squeezed_gaussian(s2, grid.x_axis, grid.hbar)
        w = cross_wigner(WindowedTransform(phi, grid), psi)
        a, b, r = fit_gaussian_decay(w)
        out.append(DecayFit(s1, s2, a, b, r))
    return out


def compact_support_probe(grid: PhaseGrid, radius: float = 2.0) -> float:
    """``||P_phi Psi_t - Psi_t||`` for the ground-state Wigner function cut to ``|z| <= radius``."""
    from .wigner import gaussian_wigner

    X, P = grid.mesh()
    cut = gaussian_wigner(grid).values * (X * X + P * P <= radius * radius)
    big = PhaseField(grid, cut)
    from .special import hermite_function
    t = WindowedTransform(hermite_function(0, grid.x_axis, grid.hbar), grid)
    return (projection(t, big) - big).norm()
