"""Moyal product, Weyl kernels, Bopp operators and phase-space translations.

Conventions: ``sigma(z, z') = p x' - p' x`` and
``a * b = sum_n (i hbar / 2)^n / n! sum_k C(n,k) (-1)^k
(d_x^{n-k} d_p^k a)(d_x^k d_p^{n-k} b)``, so that ``x * p - p * x = i hbar``.

The production product composes Weyl kernels, ``K_{a*b} = K_a K_b dx``, and
reads the symbol back off the product kernel.  Two independent routes are
provided as oracles: the twisted convolution of symplectic Fourier
transforms and the direct four-fold integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Union

import numpy as np

from .errors import (ConfigurationError, DomainError, GridMismatchError,
                     UnsupportedError)
from .grids import (PhaseField, PhaseGrid, SpatialGrid, SymplecticVector,
                    WaveField, refine, refinement_matrix, shift_with_zero_fill,
                    spectral_derivative, symplectic_fourier)
from .wigner import _pair_indices, lag_fourier

# ---------------------------------------------------------------- symbols

Monomial = tuple[int, int]


def _clean(coeffs: Mapping[Monomial, complex]) -> dict[Monomial, complex]:
    out = {}
    for (a, b), c in coeffs.items():
        if int(a) != a or int(b) != b or a < 0 or b < 0:
            raise DomainError(f"invalid monomial exponent {(a, b)}")
        c = complex(c)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise DomainError("polynomial coefficients must be finite")
        if c != 0:
            key = (int(a), int(b))
            out[key] = out.get(key, 0) + c
    return {k: v for k, v in out.items() if v != 0}


@dataclass(frozen=True, eq=False)
class PolynomialSymbol:
    """``sum c_ab x^a p^b`` plus an optional potential ``V(x)`` tabulated on an x-grid.

    The potential is carried separately because it only ever acts by
    multiplication on the x side; ``potential_grid`` says where it lives.
    """

    coefficients: Mapping[Monomial, complex]
    potential: np.ndarray | None = field(default=None, repr=False)
    potential_grid: SpatialGrid | None = None

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _clean(self.coefficients))
        if self.potential is not None:
            v = np.array(self.potential, dtype=float, copy=True)
            if self.potential_grid is None or v.shape != (self.potential_grid.n_points,):
                raise GridMismatchError("potential needs a matching potential_grid")
            if not np.all(np.isfinite(v)):
                raise DomainError("potential values must be finite")
            v.flags.writeable = False
            object.__setattr__(self, "potential", v)

    @property
    def degree(self) -> int:
        return max((a + b for a, b in self.coefficients), default=0)

    @property
    def has_potential(self) -> bool:
        return self.potential is not None

    @property
    def is_real(self) -> bool:
        return all(abs(c.imag) == 0 for c in self.coefficients.values())

    def evaluate(self, x, p) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        out = np.zeros(np.broadcast(x, p).shape, dtype=complex)
        for (a, b), c in self.coefficients.items():
            out = out + c * x ** a * p ** b
        return out

    def derivative(self, nx: int, np_: int) -> "PolynomialSymbol":
        """Polynomial part differentiated ``nx`` times in x and ``np_`` in p."""
        out = {}
        for (a, b), c in self.coefficients.items():
            if a >= nx and b >= np_:
                f = math.perm(a, nx) * math.perm(b, np_)
                out[(a - nx, b - np_)] = c * f
        return PolynomialSymbol(out)

    def __mul__(self, other: "PolynomialSymbol") -> "PolynomialSymbol":
        out: dict[Monomial, complex] = {}
        for (a, b), c in self.coefficients.items():
            for (a2, b2), c2 in other.coefficients.items():
                key = (a + a2, b + b2)
                out[key] = out.get(key, 0) + c * c2
        return PolynomialSymbol(out)

    def __add__(self, other: "PolynomialSymbol") -> "PolynomialSymbol":
        out = dict(self.coefficients)
        for k, c in other.coefficients.items():
            out[k] = out.get(k, 0) + c
        return PolynomialSymbol(out)

    def scaled(self, s: complex) -> "PolynomialSymbol":
        return PolynomialSymbol({k: s * c for k, c in self.coefficients.items()})

    def without_potential(self) -> "PolynomialSymbol":
        return PolynomialSymbol(self.coefficients)

    def sample(self, grid: PhaseGrid) -> PhaseField:
        X, P = grid.mesh()
        vals = self.evaluate(X, P)
        if self.potential is not None:
            if self.potential_grid != grid.x_axis:
                raise GridMismatchError("potential lives on a different x-grid")
            vals = vals + self.potential[:, None]
        return PhaseField(grid, vals)


def x_symbol() -> PolynomialSymbol:
    return PolynomialSymbol({(1, 0): 1.0})


def p_symbol() -> PolynomialSymbol:
    return PolynomialSymbol({(0, 1): 1.0})


def oscillator_symbol(mass: float = 1.0, omega: float = 1.0) -> PolynomialSymbol:
    """``p^2/(2m) + m omega^2 x^2 / 2``."""
    return PolynomialSymbol({(0, 2): 0.5 / mass, (2, 0): 0.5 * mass * omega ** 2})


def kinetic_plus_potential(grid: SpatialGrid, potential, mass: float = 1.0) -> PolynomialSymbol:
    """``p^2/(2m) + V(x)`` with ``V`` a callable or an array on ``grid``."""
    v = potential(grid.points) if callable(potential) else potential
    return PolynomialSymbol({(0, 2): 0.5 / mass}, np.asarray(v, dtype=float), grid)


_FIT_MONOMIALS: tuple[Monomial, ...] = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))


def fit_polynomial(f: PhaseField, rtol: float = 1e-12) -> PolynomialSymbol | None:
    """Return the degree-2 polynomial that ``f`` samples exactly, else None."""
    X, P = f.grid.mesh()
    scale_x = max(abs(f.grid.x_axis.x_min), 1.0)
    scale_p = max(abs(f.grid.p_axis.x_min), 1.0)
    cols = [(X / scale_x) ** a * (P / scale_p) ** b for a, b in _FIT_MONOMIALS]
    design = np.stack([c.ravel() for c in cols], axis=1)
    target = f.values.ravel()
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    resid = np.max(np.abs(design @ coef - target))
    if resid > rtol * max(np.max(np.abs(target)), 1e-300):
        return None
    out = {}
    for (a, b), c in zip(_FIT_MONOMIALS, coef):
        out[(a, b)] = c / (scale_x ** a * scale_p ** b)
    return PolynomialSymbol(out)


Symbol = Union[PhaseField, PolynomialSymbol]


def moyal_polynomial(a: PolynomialSymbol, b: PolynomialSymbol,
                     hbar: float = 1.0) -> PolynomialSymbol:
    """Exact star product of two polynomials (the series terminates)."""
    if a.has_potential or b.has_potential:
        raise UnsupportedError("tabulated potentials have no finite Moyal series")
    out = PolynomialSymbol({})
    for n in range(a.degree + b.degree + 1):
        pref = (0.5j * hbar) ** n / math.factorial(n)
        for k in range(n + 1):
            term = a.derivative(n - k, k) * b.derivative(k, n - k)
            out = out + term.scaled(pref * math.comb(n, k) * (-1) ** k)
    return out


# ----------------------------------------------------------- Weyl kernels

@dataclass(frozen=True, eq=False)
class WeylKernel:
    """Kernel ``K(x_i, x_j)`` of a Weyl operator; ``(A psi)_i = sum_j K_ij psi_j dx``.

    The phase grid is kept so that the symbol can be read back on the same
    momentum lattice.
    """

    grid: PhaseGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex, copy=True)
        n = self.grid.x_axis.n_points
        if v.shape != (n, n):
            raise GridMismatchError(f"kernel shape {v.shape} does not match {n} points")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def matrix(self) -> np.ndarray:
        """Operator matrix acting on sample vectors."""
        return self.values * self.grid.dx

    def apply(self, psi: WaveField) -> WaveField:
        if psi.grid != self.grid.x_axis:
            raise GridMismatchError("wave field does not live on the kernel grid")
        return WaveField(psi.grid, self.matrix @ psi.values)

    def compose(self, other: "WeylKernel") -> "WeylKernel":
        if other.grid != self.grid:
            raise GridMismatchError("kernels live on different grids")
        return WeylKernel(self.grid, self.values @ other.values * self.grid.dx)

    def hermiticity_error(self) -> float:
        k = self.values
        return float(np.max(np.abs(k - k.conj().T)) / max(np.max(np.abs(k)), 1e-300))


@lru_cache(maxsize=16)
def _lag_synthesis(grid: PhaseGrid) -> np.ndarray:
    """``D[b, d] = exp(i p_b d dx / hbar)`` for lags ``d in [-(n-1), n-1]``."""
    n = grid.x_axis.n_points
    lags = np.arange(-(n - 1), n) * grid.dx
    mat = np.exp(1j * np.outer(grid.p_axis.points, lags) / grid.hbar)
    mat.flags.writeable = False
    return mat


def _fine_x(grid: PhaseGrid) -> np.ndarray:
    return grid.x_axis.x_min + 0.5 * grid.dx * np.arange(2 * grid.x_axis.n_points)


def _as_symbol(h: Symbol) -> Symbol:
    """Promote fields that are exact quadratic polynomials to symbols."""
    if isinstance(h, PhaseField):
        poly = fit_polynomial(h)
        if poly is not None:
            return poly
    return h


def _symbol_on_midpoints(h: Symbol, grid: PhaseGrid) -> np.ndarray:
    """Symbol on (half-spaced x, grid p); the x-part of a potential is excluded."""
    if isinstance(h, PolynomialSymbol):
        xf, p = np.meshgrid(_fine_x(grid), grid.p_axis.points, indexing="ij")
        return h.evaluate(xf, p)
    if h.grid != grid:
        raise GridMismatchError("symbol lives on a different grid")
    return refine(h.values, axis=0, real=True)


def weyl_matrix(h: Symbol, grid: PhaseGrid | None = None) -> WeylKernel:
    """Kernel ``K(x, y) = (2 pi hbar)^{-1} \\int e^{ip(x-y)/hbar} H((x+y)/2, p) dp``.

    ``h`` may be a sampled field or a polynomial symbol; fields that are
    exact quadratic polynomials are evaluated symbolically, since a
    non-decaying symbol cannot be resampled by trigonometric interpolation.
    """
    if grid is None:
        if not isinstance(h, PhaseField):
            raise ConfigurationError("a grid is required for polynomial symbols")
        grid = h.grid
    elif isinstance(h, PhaseField) and h.grid != grid:
        raise GridMismatchError("symbol lives on a different grid")
    h = _as_symbol(h)
    n = grid.x_axis.n_points
    mid = _symbol_on_midpoints(h, grid)                 # (2n, n_p)
    t = mid @ _lag_synthesis(grid)                      # (2n, 2n-1)
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    k = t[i + j, i - j + n - 1] * (grid.dp / (2 * math.pi * grid.hbar))
    if isinstance(h, PhaseField):
        # the momentum sum is periodic in the lag and a sampled symbol is
        # assumed to decay, so keep the minimum image only; polynomial
        # symbols are differential operators and keep the periodic kernel
        period = 2 * math.pi * grid.hbar / grid.dp
        lag = np.abs(i - j) * grid.dx
        tol = 1e-9 * grid.dx
        k = k * np.where(lag < period / 2 - tol, 1.0,
                         np.where(lag <= period / 2 + tol, 0.5, 0.0))
    if isinstance(h, PolynomialSymbol) and h.has_potential:
        if h.potential_grid != grid.x_axis:
            raise GridMismatchError("potential lives on a different x-grid")
        k = k + np.diag(h.potential) / grid.dx
    return WeylKernel(grid, k)


def symbol_of(kernel: WeylKernel) -> PhaseField:
    """``a(x, p) = \\int e^{-ipy/hbar} K(x + y/2, x - y/2) dy``."""
    grid = kernel.grid
    n = grid.x_axis.n_points
    r = refinement_matrix(n)
    fine = r @ kernel.values @ r.conj().T
    padded = np.zeros((2 * n + 1, 2 * n + 1), dtype=complex)
    padded[:2 * n, :2 * n] = fine
    plus, minus = _pair_indices(n)
    return PhaseField(grid, lag_fourier(padded[plus, minus], grid))


# ----------------------------------------------------------- star products

def _common_grid(a: Symbol, b: Symbol, grid: PhaseGrid | None) -> PhaseGrid:
    grids = [s.grid for s in (a, b) if isinstance(s, PhaseField)]
    if grid is not None:
        grids.append(grid)
    if not grids:
        raise ConfigurationError("a grid is required when both factors are polynomials")
    if any(g != grids[0] for g in grids[1:]):
        raise GridMismatchError("star product factors live on different grids")
    return grids[0]


def star_product(a: Symbol, b: Symbol, grid: PhaseGrid | None = None,
                 refine_factor: int = 1) -> PhaseField:
    """Moyal product ``a * b`` sampled on the common grid.

    Two polynomials are multiplied with the terminating series.  Otherwise
    the Weyl kernels are composed and the symbol of the product is taken;
    the cost is ``O(N^3)`` for an ``N x N`` grid.  ``refine_factor > 1``
    first interpolates sampled factors onto a lattice that many times finer
    in both directions (same box) and samples the result back, which helps
    on very coarse grids.
    """
    g = _common_grid(a, b, grid)
    a, b = _as_symbol(a), _as_symbol(b)
    if isinstance(a, PolynomialSymbol) and isinstance(b, PolynomialSymbol) \
            and not (a.has_potential or b.has_potential):
        return moyal_polynomial(a, b, g.hbar).sample(g)
    r = int(refine_factor)
    if r < 1:
        raise ConfigurationError("refine_factor must be >= 1")
    if r == 1:
        return symbol_of(weyl_matrix(a, g).compose(weyl_matrix(b, g)))
    if any(isinstance(s, PolynomialSymbol) and s.has_potential for s in (a, b)):
        raise UnsupportedError("refinement of tabulated potentials is not supported")
    fine = PhaseGrid(SpatialGrid(g.x_axis.x_min, g.x_axis.x_max, r * g.x_axis.n_points),
                     SpatialGrid(g.p_axis.x_min, g.p_axis.x_max, r * g.p_axis.n_points),
                     g.hbar)

    def lift(s: Symbol) -> Symbol:
        if isinstance(s, PolynomialSymbol):
            return s
        return PhaseField(fine, refine(refine(s.values, 0, r), 1, r))

    c = symbol_of(weyl_matrix(lift(a), fine).compose(weyl_matrix(lift(b), fine)))
    return PhaseField(g, c.values[::r, ::r])


def star_product_twisted(a: PhaseField, b: PhaseField, max_points: int = 64) -> PhaseField:
    """Star product through the twisted convolution of symplectic transforms.

    ``(a*b)_sigma(w) = (2 pi hbar)^{-1} \\int a_sigma(z) b_sigma(w - z)
    e^{i sigma(z, w) / (2 hbar)} dz``; the half-angle phase is not periodic on
    the lattice, so the convolution is carried out directly (``O(N^4)``).
    """
    if a.grid != b.grid:
        raise GridMismatchError("star product factors live on different grids")
    grid = a.grid
    grid.require_compatible("the twisted-convolution star product")
    n = grid.x_axis.n_points
    if n > max_points:
        raise ConfigurationError(f"twisted convolution limited to {max_points} points per axis")
    fa = symplectic_fourier(a).values
    pad = np.zeros((3 * n, 3 * n), dtype=complex)
    pad[n:2 * n, n:2 * n] = symplectic_fourier(b).values
    c = n // 2
    idx = np.arange(n) - c
    zx, zp = np.meshgrid(idx, idx, indexing="ij")
    unit = grid.cell / (2 * grid.hbar)
    out = np.zeros((n, n), dtype=complex)
    for sx in idx:
        rows = n + c + sx - idx
        for sp in idx:
            sub = pad[np.ix_(rows, n + c + sp - idx)]
            phase = np.exp(-1j * unit * (sp * zx - zp * sx))
            out[sx + c, sp + c] = np.sum(fa * sub * phase)
    out *= grid.cell / (2 * math.pi * grid.hbar)
    return symplectic_fourier(PhaseField(grid, out))


def star_product_direct(a: PhaseField, b: PhaseField, refine_factor: int = 1,
                        max_points: int = 32) -> PhaseField:
    """Direct quadrature of

        (a*b)(z) = (pi hbar)^{-2} \\iint e^{(2i/hbar) sigma(z' - z, z - z'')}
                   a(z') b(z'') dz' dz''.

    With ``refine_factor > 1`` both factors are trigonometrically
    interpolated onto a lattice that many times finer before summing, which
    tames the aliasing of the chirp; outputs are on the original nodes.
    """
    if a.grid != b.grid:
        raise GridMismatchError("star product factors live on different grids")
    grid = a.grid
    nx, np_ = grid.shape
    if max(nx, np_) > max_points:
        raise ConfigurationError(
            f"direct quadrature refused: grid {nx}x{np_} exceeds {max_points}x{max_points}")
    r = int(refine_factor)
    if r < 1:
        raise ConfigurationError("refine_factor must be >= 1")
    av, bv = a.values, b.values
    xs, ps = grid.x_axis.points, grid.p_axis.points
    dx, dp = grid.dx, grid.dp
    if r > 1:
        av = refine(refine(av, 0, r), 1, r)
        bv = refine(refine(bv, 0, r), 1, r)
        xs = grid.x_axis.x_min + dx / r * np.arange(nx * r)
        ps = grid.p_axis.x_min + dp / r * np.arange(np_ * r)
        dx, dp = dx / r, dp / r
    h = grid.hbar
    k = 2.0 / h
    # sum_{z', z''} a(z') b(z'') exp(ik[p'x - px' + px'' - p''x - p'x'' + p''x'])
    cross_xp = np.exp(1j * k * np.outer(xs, ps))      # [x', p''] -> e^{ik x' p''}
    out = np.zeros(grid.shape, dtype=complex)
    for ix, x in enumerate(grid.x_axis.points):
        ex_b = np.exp(-1j * k * x * ps)                # e^{-ik p'' x}
        ex_a = np.exp(1j * k * x * ps)                 # e^{ik p' x}
        for ip, p in enumerate(grid.p_axis.points):
            # inner[p', p''] = sum_{x''} e^{-ik p'x''} e^{ik p x''} b(x'', p'')
            bz = bv * (np.exp(1j * k * p * xs)[:, None] * ex_b[None, :])
            inner = np.exp(-1j * k * np.outer(ps, xs)) @ bz
            # outer[x', p'] = sum_{p''} e^{ik x' p''} inner[p', p'']
            outer = cross_xp @ inner.T
            az = av * (np.exp(-1j * k * p * xs)[:, None] * ex_a[None, :])
            out[ix, ip] = np.sum(az * outer)
    out *= (dx * dp) ** 2 / (math.pi * h) ** 2
    return PhaseField(grid, out)


# ----------------------------------------------------------- Bopp operator

def _bidifferential(h: PolynomialSymbol, psi: PhaseField, side: int) -> PhaseField:
    grid = psi.grid
    X, P = grid.mesh()
    out = np.zeros(grid.shape, dtype=complex)
    for n in range(h.degree + 1):
        pref = (side * 0.5j * grid.hbar) ** n / math.factorial(n)
        for k in range(n + 1):
            dh = h.derivative(n - k, k)
            if not dh.coefficients:
                continue
            d = spectral_derivative(psi.values, grid.dx, axis=0, order=k)
            d = spectral_derivative(d, grid.dp, axis=1, order=n - k)
            out += pref * math.comb(n, k) * (-1) ** k * dh.evaluate(X, P) * d
    return PhaseField(grid, out)


def bopp_apply(h: PolynomialSymbol, psi: PhaseField, right: bool = False) -> PhaseField:
    """``H(x + i hbar/2 d_p, p - i hbar/2 d_x) Psi``, which is ``H * Psi``.

    With ``right=True`` returns ``Psi * H``, the conjugate Bopp shift.
    Derivatives are spectral.  Only polynomial parts of degree <= 2 are
    accepted: a tabulated potential would need an infinite-order operator.
    """
    if h.has_potential:
        raise UnsupportedError("tabulated potentials go through star_product, not Bopp shifts")
    if h.degree > 2:
        raise UnsupportedError("Bopp shift implemented for degree <= 2; use star_product")
    return _bidifferential(h, psi, -1 if right else 1)


# ------------------------------------------------------------ translations

def _steps(axis: SpatialGrid, shift: float, what: str) -> int:
    s = axis.steps(shift)
    if s is None:
        raise DomainError(f"{what} = {shift!r} is not a multiple of the grid spacing {axis.dx!r}")
    return s


def heisenberg_weyl(z0: SymplecticVector, psi: WaveField, hbar: float = 1.0) -> WaveField:
    """``T(z0) psi(x) = exp(i (p0 x - p0 x0 / 2) / hbar) psi(x - x0)``; zero-filled shift."""
    x0, p0 = z0.x, z0.p
    s = _steps(psi.grid, x0, "x0")
    shifted = shift_with_zero_fill(psi.values, (s,), (0,))
    x = psi.grid.points
    return WaveField(psi.grid, np.exp(1j * (p0 * x - 0.5 * p0 * x0) / hbar) * shifted)


def phase_translate(z0: SymplecticVector, psi: PhaseField) -> PhaseField:
    """``T~(z0) Psi(z) = exp(-i sigma(z, z0) / hbar) Psi(z - z0/2)``."""
    grid = psi.grid
    sx = _steps(grid.x_axis, z0.x / 2, "x0/2")
    sp = _steps(grid.p_axis, z0.p / 2, "p0/2")
    shifted = shift_with_zero_fill(psi.values, (sx, sp), (0, 1))
    X, P = grid.mesh()
    sigma = P * z0.x - z0.p * X
    return PhaseField(grid, np.exp(-1j * sigma / grid.hbar) * shifted)


def smooth_cutoff(t: np.ndarray, inner: float, outer: float) -> np.ndarray:
    """C-infinity function equal to 1 for ``|t| <= inner`` and 0 for ``|t| >= outer``."""
    s = np.clip((np.abs(t) - inner) / (outer - inner), 0.0, 1.0)

    def bump(u):
        return np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)

    return bump(1 - s) / (bump(1 - s) + bump(s))


def weyl_apply_covariant(h: PhaseField, psi: WaveField, flat: float = 0.6,
                         edge: float = 0.99) -> WaveField:
    """``H psi = (2 pi hbar)^{-1} \\iint H_sigma(z0) T(z0) psi dz0`` as a lattice sum.

    ``H_sigma`` is the symplectic Fourier transform of the symbol; every
    lattice ``x0`` is a whole number of steps, so no interpolation enters.
    A symbol that is an exact quadratic polynomial does not decay and its
    covariant symbol is a distribution; it is multiplied by a smooth cutoff
    equal to one on the central ``flat`` fraction of the box and zero beyond
    ``edge``, which leaves the action on wave functions confined to that
    region unchanged.
    """
    grid = h.grid
    grid.require_compatible("the covariant Weyl representation")
    if psi.grid != grid.x_axis:
        raise GridMismatchError("wave field does not live on the symbol grid")
    n = grid.x_axis.n_points
    if fit_polynomial(h) is not None:
        X, P = grid.mesh()
        lx, lp = grid.x_axis.x_max, grid.p_axis.x_max
        h = PhaseField(grid, h.values * smooth_cutoff(X, flat * lx, edge * lx)
                       * smooth_cutoff(P, flat * lp, edge * lp))
    hs = symplectic_fourier(h).values
    x, p = grid.x_axis.points, grid.p_axis.points
    a = hs * np.exp(-0.5j * np.outer(x, p) / grid.hbar)
    g = a @ np.exp(1j * np.outer(x, p) / grid.hbar).T           # g[a, i]
    # psi[i - a + n/2] with zero fill
    i = np.arange(n)[None, :]
    src = i - np.arange(n)[:, None] + n // 2
    ok = (src >= 0) & (src < n)
    shifted = np.where(ok, psi.values[np.clip(src, 0, n - 1)], 0)
    out = np.sum(g * shifted, axis=0) * grid.cell / (2 * math.pi * grid.hbar)
    return WaveField(psi.grid, out)


# --------------------------------------------- kernel of Psi -> H * Psi

def covariant_symbol_quadrature(h: Callable, zeta_x: np.ndarray, zeta_p: np.ndarray,
                                hbar: float, half_width: float, n: int) -> np.ndarray:
    """``H_sigma(zeta) = (2 pi hbar)^{-1} \\int e^{i sigma(v, zeta)/hbar} H(v) dv`` by quadrature.

    Uses an ``n x n`` midpoint lattice on ``[-half_width, half_width]^2``; the
    lattice must resolve both ``H`` and the chirp at the largest ``|zeta|``.
    """
    v = -half_width + (np.arange(n) + 0.5) * (2 * half_width / n)
    dv = 2 * half_width / n
    hv = h(v[:, None], v[None, :])                         # [vx, vp]
    zx = np.ravel(zeta_x)
    zp = np.ravel(zeta_p)
    vals = np.empty(zx.size, dtype=complex)
    chunk = 2048
    for s in range(0, zx.size, chunk):
        # sigma(v, zeta) = v_p zeta_x - zeta_p v_x
        ex = np.exp(-1j * np.outer(zp[s:s + chunk], v) / hbar)
        ep = np.exp(1j * np.outer(zx[s:s + chunk], v) / hbar)
        vals[s:s + chunk] = np.sum((ex @ hv) * ep, axis=1)
    return (vals * dv * dv / (2 * math.pi * hbar)).reshape(np.shape(zeta_x))


def star_operator_kernel(h_sigma: Callable, grid: PhaseGrid,
                         rows: np.ndarray) -> np.ndarray:
    """Rows of the kernel of ``Psi -> H * Psi``:

        K(z, y) = (2 / (pi hbar)) e^{2i sigma(z, y)/hbar} H_sigma(2 (z - y)),

    for the output nodes ``rows`` (integer array of shape ``(m, 2)`` holding
    x and p indices) against every grid node ``y``.  ``h_sigma`` evaluates
    the covariant symbol at arrays ``(zeta_x, zeta_p)``; it is called once
    on the lattice of index differences.  Applying the kernel is
    ``K @ Psi.values.ravel() * dx * dp``.
    """
    rows = np.asarray(rows, dtype=int).reshape(-1, 2)
    nx, np_ = grid.shape
    dxi = rows[:, 0:1] - np.arange(nx)[None, :]          # (m, nx)
    dpi = rows[:, 1:2] - np.arange(np_)[None, :]         # (m, np)
    ux, ix = np.unique(dxi, return_inverse=True)
    up, ip = np.unique(dpi, return_inverse=True)
    ix, ip = ix.reshape(dxi.shape), ip.reshape(dpi.shape)
    zx, zp = np.meshgrid(2 * ux * grid.dx, 2 * up * grid.dp, indexing="ij")
    table = h_sigma(zx, zp)                               # (len ux, len up)
    hs = table[ix[:, :, None], ip[:, None, :]]            # (m, nx, np)
    x, p = grid.x_axis.points, grid.p_axis.points
    ox, op = x[rows[:, 0]], p[rows[:, 1]]
    # sigma(z, y) = p_z x_y - p_y x_z
    sigma = op[:, None, None] * x[None, :, None] - p[None, None, :] * ox[:, None, None]
    k = (2 / (math.pi * grid.hbar)) * np.exp(2j * sigma / grid.hbar) * hs
    return k.reshape(rows.shape[0], nx * np_)
