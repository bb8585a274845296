"""Sampling lattices, complex fields and the symplectic Fourier transform.

Everything here is immutable: field arrays are copied on construction and
flagged read-only, so fields can be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import ConfigurationError, GridMismatchError

# relative tolerance for "dx * dp == 2 pi hbar / N"
_COMPAT_RTOL = 1e-12


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform lattice ``x_j = x_min + j*dx``, ``j = 0..n_points-1``.

    ``x_max`` is the (excluded) right end of the periodic cell, so
    ``dx = (x_max - x_min) / n_points``.
    """

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ConfigurationError("grid bounds must be finite")
        if not self.x_max > self.x_min:
            raise ConfigurationError(
                f"x_max ({self.x_max}) must exceed x_min ({self.x_min})")
        if int(self.n_points) != self.n_points:
            raise ConfigurationError("n_points must be an integer")
        object.__setattr__(self, "n_points", int(self.n_points))
        if self.n_points < 8 or self.n_points % 2:
            raise ConfigurationError(
                f"n_points must be even and >= 8, got {self.n_points}")
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "x_max", float(self.x_max))

    @classmethod
    def centered(cls, half_width: float, n_points: int) -> "SpatialGrid":
        return cls(-float(half_width), float(half_width), n_points)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def points(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def is_centered(self) -> bool:
        return abs(self.x_min + self.x_max) <= 1e-12 * (self.x_max - self.x_min)

    def index_of(self, x: float, tol: float = 1e-9) -> int | None:
        """Index of the node at ``x``, or None if ``x`` is not a node."""
        j = (x - self.x_min) / self.dx
        jr = round(j)
        if abs(j - jr) > tol:
            return None
        return int(jr)

    def steps(self, shift: float, tol: float = 1e-9) -> int | None:
        """``shift / dx`` if it is an integer, else None."""
        s = shift / self.dx
        sr = round(s)
        if abs(s - sr) > tol:
            return None
        return int(sr)


@dataclass(frozen=True)
class PhaseGrid:
    """Product lattice for ``z = (x, p)`` together with the value of hbar.

    Both axes must be centered.  The grid is *DFT-compatible* when both axes
    have the same number of points ``N`` and ``dx * dp = 2 pi hbar / N``; the
    symplectic Fourier transform and the covariant Weyl representation
    require it, everything else works on any centered grid.
    """

    x_axis: SpatialGrid
    p_axis: SpatialGrid
    hbar: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise ConfigurationError(f"hbar must be positive, got {self.hbar}")
        object.__setattr__(self, "hbar", float(self.hbar))
        if not (self.x_axis.is_centered and self.p_axis.is_centered):
            raise ConfigurationError("phase-space grids must be centered")

    @classmethod
    def compatible(cls, x_axis: SpatialGrid, hbar: float = 1.0) -> "PhaseGrid":
        """Grid whose momentum axis is the DFT dual of ``x_axis``."""
        n = x_axis.n_points
        dp = 2 * math.pi * hbar / (n * x_axis.dx)
        half = n * dp / 2
        return cls(x_axis, SpatialGrid(-half, half, n), hbar)

    @classmethod
    def square(cls, half_width: float, n_points: int,
               hbar: float = 1.0) -> "PhaseGrid":
        """Same axis for x and p; DFT-compatible only for special sizes."""
        axis = SpatialGrid.centered(half_width, n_points)
        return cls(axis, axis, hbar)

    @classmethod
    def compatible_square(cls, n_points: int, hbar: float = 1.0) -> "PhaseGrid":
        """Square DFT-compatible grid: ``dx = dp = sqrt(2 pi hbar / n)``."""
        return cls.square(math.sqrt(n_points * math.pi * hbar / 2), n_points, hbar)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.x_axis.n_points, self.p_axis.n_points)

    @property
    def dx(self) -> float:
        return self.x_axis.dx

    @property
    def dp(self) -> float:
        return self.p_axis.dx

    @property
    def cell(self) -> float:
        return self.dx * self.dp

    @property
    def is_compatible(self) -> bool:
        n = self.x_axis.n_points
        if self.p_axis.n_points != n:
            return False
        target = 2 * math.pi * self.hbar / n
        return abs(self.cell - target) <= _COMPAT_RTOL * target

    def require_compatible(self, what: str = "this operation") -> None:
        if not self.is_compatible:
            raise ConfigurationError(
                f"{what} needs a DFT-compatible grid (dx*dp = 2*pi*hbar/N)")

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """``(X, P)`` arrays of shape ``(n_x, n_p)``."""
        return np.meshgrid(self.x_axis.points, self.p_axis.points,
                           indexing="ij")


def _frozen(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


class _FieldOps:
    """Linear-space arithmetic shared by the two field types."""

    def _like(self, values):
        return type(self)(self.grid, values)

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} "
                            f"with {type(other).__name__}")
        if other.grid != self.grid:
            raise GridMismatchError("fields live on different grids")

    def __add__(self, other):
        self._check(other)
        return self._like(self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return self._like(self.values - other.values)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return self._like(self.values * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return self._like(self.values / scalar)

    def __neg__(self):
        return self._like(-self.values)

    def conj(self):
        return self._like(np.conj(self.values))

    def norm(self) -> float:
        return math.sqrt(abs(inner_product(self, self)))

    def normalized(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("cannot normalize the zero field")
        return self / n

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class WaveField(_FieldOps):
    """Complex samples of a function of x."""

    grid: SpatialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.shape != (self.grid.n_points,):
            raise GridMismatchError(
                f"values of shape {vals.shape} do not match a grid of "
                f"{self.grid.n_points} points")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid: SpatialGrid, fn) -> "WaveField":
        return cls(grid, fn(grid.points))

    @classmethod
    def zeros(cls, grid: SpatialGrid) -> "WaveField":
        return cls(grid, np.zeros(grid.n_points))


@dataclass(frozen=True, eq=False)
class PhaseField(_FieldOps):
    """Complex samples of a function of ``z = (x, p)``; axis 0 is x."""

    grid: PhaseGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.shape != self.grid.shape:
            raise GridMismatchError(
                f"values of shape {vals.shape} do not match grid shape "
                f"{self.grid.shape}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid: PhaseGrid, fn) -> "PhaseField":
        X, P = grid.mesh()
        return cls(grid, np.broadcast_to(fn(X, P), grid.shape))

    @classmethod
    def zeros(cls, grid: PhaseGrid) -> "PhaseField":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: PhaseGrid, value: complex = 1.0) -> "PhaseField":
        return cls(grid, np.full(grid.shape, value, dtype=complex))


Field = Union[WaveField, PhaseField]


@dataclass(frozen=True)
class SymplecticVector:
    x: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.p)):
            raise ValueError("symplectic vector components must be finite")

    def __add__(self, other: "SymplecticVector") -> "SymplecticVector":
        return SymplecticVector(self.x + other.x, self.p + other.p)

    def __neg__(self) -> "SymplecticVector":
        return SymplecticVector(-self.x, -self.p)

    def scaled(self, c: float) -> "SymplecticVector":
        return SymplecticVector(c * self.x, c * self.p)


def _as_vector(z) -> SymplecticVector:
    if isinstance(z, SymplecticVector):
        return z
    x, p = z
    return SymplecticVector(float(x), float(p))


def symplectic_form(z, z2) -> float:
    """``sigma(z, z') = p x' - p' x``."""
    a, b = _as_vector(z), _as_vector(z2)
    return a.p * b.x - b.p * a.x


def inner_product(a: Field, b: Field) -> complex:
    """Riemann sum of ``a * conj(b)``; conjugate-linear in ``b``."""
    if type(a) is not type(b):
        raise GridMismatchError("inner product of fields of different kinds")
    if a.grid != b.grid:
        raise GridMismatchError("inner product of fields on different grids")
    if isinstance(a, WaveField):
        measure = a.grid.dx
    else:
        measure = a.grid.cell
    return complex(np.vdot(b.values, a.values) * measure)


def _cdft(v: np.ndarray, axis: int, sign: int) -> np.ndarray:
    """Unnormalized DFT with centered input and output indices."""
    v = np.fft.ifftshift(v, axes=axis)
    out = np.fft.fft(v, axis=axis) if sign < 0 else np.fft.ifft(v, axis=axis) * v.shape[axis]
    return np.fft.fftshift(out, axes=axis)


def symplectic_fourier(psi: PhaseField) -> PhaseField:
    """``(2 pi hbar)^-1 \\int exp(-i sigma(z, z')/hbar) Psi(z') dz'`` on the lattice.

    The x'-sum produces the output momentum index and the p'-sum the output
    position index, hence the final transpose.  On a compatible grid the
    result is an exact discrete unitary involution.
    """
    grid = psi.grid
    grid.require_compatible("the symplectic Fourier transform")
    n = grid.x_axis.n_points
    g = _cdft(psi.values, axis=0, sign=-1)    # x' -> p
    g = _cdft(g, axis=1, sign=+1)             # p' -> x
    return PhaseField(grid, g.T / n)


# -- band-limited resampling shared by the Wigner and Weyl machinery --------

@lru_cache(maxsize=32)
def refinement_matrix(n: int, factor: int = 2, real: bool = False) -> np.ndarray:
    """Matrix of trigonometric interpolation from ``n`` nodes to ``factor*n``.

    Row ``factor*j`` reproduces node ``j`` exactly.  By default the
    interpolant uses the modes ``k = -n/2 .. n/2-1``, for which
    ``R R^H`` restricted to the nodes is the identity, i.e. the kernel of
    the identity operator is reproduced at every fine point.  With
    ``real=True`` the Nyquist mode is split evenly so that real data stay
    real.
    """
    eye = np.eye(n)
    coeffs = np.fft.fft(eye, axis=0)
    m = factor * n
    padded = np.zeros((m, n), dtype=complex)
    h = n // 2
    padded[:h] = coeffs[:h]
    padded[m - h + 1:] = coeffs[h + 1:]
    if real:
        padded[h] = coeffs[h] / 2
        padded[m - h] = coeffs[h] / 2
    else:
        padded[m - h] = coeffs[h]
    mat = np.fft.ifft(padded, axis=0) * factor
    mat.flags.writeable = False
    return mat


def refine(values: np.ndarray, axis: int = 0, factor: int = 2,
           real: bool = False) -> np.ndarray:
    """Trigonometric interpolation of ``values`` along ``axis``."""
    r = refinement_matrix(values.shape[axis], factor, real)
    moved = np.moveaxis(values, axis, 0)
    out = np.tensordot(r, moved, axes=(1, 0))
    return np.moveaxis(out, 0, axis)


def spectral_derivative(values: np.ndarray, spacing: float, axis: int = 0,
                        order: int = 1) -> np.ndarray:
    """Periodic Fourier derivative along ``axis``.

    For odd orders the Nyquist mode is dropped, for even orders it is kept,
    which is the usual convention for even-length grids.
    """
    if order == 0:
        return np.asarray(values, dtype=complex)
    n = values.shape[axis]
    k = 2 * np.pi * np.fft.fftfreq(n, d=spacing)
    mult = (1j * k) ** order
    if order % 2:
        mult[n // 2] = 0
    shape = [1] * values.ndim
    shape[axis] = n
    spec = np.fft.fft(values, axis=axis) * mult.reshape(shape)
    return np.fft.ifft(spec, axis=axis)


def shift_with_zero_fill(values: np.ndarray, steps, axes) -> np.ndarray:
    """``out[i] = values[i - steps]`` along each axis, zero where undefined."""
    out = np.asarray(values)
    for s, ax in zip(steps, axes):
        if s == 0:
            continue
        n = out.shape[ax]
        res = np.zeros_like(out)
        src = [slice(None)] * out.ndim
        dst = [slice(None)] * out.ndim
        if abs(s) < n:
            if s > 0:
                dst[ax], src[ax] = slice(s, n), slice(0, n - s)
            else:
                dst[ax], src[ax] = slice(0, n + s), slice(-s, n)
            res[tuple(dst)] = out[tuple(src)]
        out = res
    return out
