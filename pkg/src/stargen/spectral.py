"""Eigenproblems for Weyl operators and their phase-space counterparts.

The usual eigenproblem ``H psi = lambda psi`` is solved with a dense
Hermitian matrix on the x-lattice.  Star-genfunctions are then obtained as
``Psi = W_phi psi`` for any unit window, and conversely ``W_phi^* Psi`` gives
back an eigenfunction whenever the window does not annihilate ``Psi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy.linalg import eigh

from .errors import (ConfigurationError, NumericalContractError,
                     UnsupportedError, WindowAnnihilationError)
from .grids import PhaseField, PhaseGrid, SpatialGrid, WaveField, inner_product
from .moyal import (PolynomialSymbol, bopp_apply, kinetic_plus_potential,
                    oscillator_symbol, star_product, weyl_matrix)
from .special import hermite_function
from .symplectic import check_spd
from .wigner import WindowedTransform, cross_wigner, stargen_basis, wigner_adjoint

HERMITICITY_TOL = 1e-10
ANNIHILATION_TOL = 1e-10

KINDS = ("quadratic-1d", "kinetic-plus-potential", "quadratic-nd")


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """What Hamiltonian to quantize.

    ``quadratic-1d`` carries a polynomial symbol of degree <= 2,
    ``kinetic-plus-potential`` a potential callable ``V(x)`` (with kinetic
    term ``p^2 / (2 mass)``), and ``quadratic-nd`` a positive-definite
    matrix ``M`` for ``H = M z . z / 2``.
    """

    kind: str
    polynomial: PolynomialSymbol | None = None
    potential: Callable[[np.ndarray], np.ndarray] | None = None
    mass: float = 1.0
    matrix: np.ndarray | None = field(default=None, repr=False)
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown Hamiltonian kind {self.kind!r}")
        if self.kind == "quadratic-1d":
            if self.polynomial is None or self.polynomial.has_potential:
                raise ConfigurationError("quadratic-1d needs a bare polynomial symbol")
            if self.polynomial.degree > 2:
                raise ConfigurationError("quadratic-1d symbols have degree <= 2")
        elif self.kind == "kinetic-plus-potential":
            if self.potential is None:
                raise ConfigurationError("kinetic-plus-potential needs a potential")
        else:
            if self.matrix is None:
                raise ConfigurationError("quadratic-nd needs a matrix")
            m = np.array(check_spd(self.matrix), copy=True)
            m.flags.writeable = False
            object.__setattr__(self, "matrix", m)

    @classmethod
    def oscillator(cls, mass: float = 1.0, omega: float = 1.0) -> "HamiltonianSpec":
        return cls("quadratic-1d", polynomial=oscillator_symbol(mass, omega),
                   label="oscillator")

    @classmethod
    def quadratic(cls, coefficients) -> "HamiltonianSpec":
        return cls("quadratic-1d", polynomial=PolynomialSymbol(coefficients),
                   label="quadratic")

    @classmethod
    def kinetic_potential(cls, potential, mass: float = 1.0,
                          label: str = "potential") -> "HamiltonianSpec":
        return cls("kinetic-plus-potential", potential=potential, mass=mass, label=label)

    @classmethod
    def quadratic_nd(cls, matrix) -> "HamiltonianSpec":
        return cls("quadratic-nd", matrix=matrix, label="quadratic-nd")

    def symbol(self, grid: SpatialGrid) -> PolynomialSymbol:
        """Symbol with any potential tabulated on ``grid``."""
        if self.kind == "quadratic-1d":
            return self.polynomial
        if self.kind == "kinetic-plus-potential":
            return kinetic_plus_potential(grid, self.potential, self.mass)
        raise UnsupportedError("quadratic-nd Hamiltonians are handled by quadratic_spectrum")


@dataclass(frozen=True)
class EigenPair:
    eigenvalue: float
    psi: WaveField
    residual: float


@dataclass(frozen=True)
class StarGenPair:
    eigenvalue: float
    big_psi: PhaseField
    window_index: Union[int, str]


@dataclass(frozen=True)
class ExpansionCoefficients:
    alphas: np.ndarray
    fixed_j: int
    cross_energy: float

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.alphas) ** 2))


def operator_matrix(h: HamiltonianSpec, grid: SpatialGrid, hbar: float = 1.0) -> np.ndarray:
    """Matrix of the Weyl operator acting on sample vectors of ``grid``."""
    pgrid = PhaseGrid.compatible(grid, hbar)
    return weyl_matrix(h.symbol(grid), pgrid).matrix


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    out = v * (abs(v[k]) / v[k])
    out[k] = abs(v[k])
    return out


def eigensolve(h: HamiltonianSpec, grid: SpatialGrid, hbar: float = 1.0,
               count: int = 8) -> list[EigenPair]:
    """Lowest ``count`` eigenpairs of the Weyl-quantized ``h`` on ``grid``.

    Eigenvectors are unit-norm in the grid inner product and their
    largest-magnitude sample is real and positive.
    """
    if h.kind == "quadratic-nd":
        raise UnsupportedError("use quadratic_spectrum for quadratic-nd Hamiltonians")
    n = grid.n_points
    if count < 0 or count > n // 4:
        raise ConfigurationError(f"count must lie in [0, {n // 4}], got {count}")
    if count == 0:
        return []
    a = operator_matrix(h, grid, hbar)
    err = float(np.max(np.abs(a - a.conj().T)) / np.max(np.abs(a)))
    if err > HERMITICITY_TOL:
        raise NumericalContractError(f"operator matrix is not Hermitian (relative error {err:.2e})")
    a = 0.5 * (a + a.conj().T)
    vals, vecs = eigh(a, subset_by_index=[0, count - 1])
    out = []
    for lam, v in zip(vals, vecs.T):
        v = _fix_phase(v) / math.sqrt(grid.dx)
        res = float(np.linalg.norm(a @ v - lam * v) * math.sqrt(grid.dx))
        out.append(EigenPair(float(lam), WaveField(grid, v), res))
    return out


def _window(window: Union[int, WaveField], grid: PhaseGrid) -> tuple[WaveField, Union[int, str]]:
    if isinstance(window, WaveField):
        return window, "custom"
    return hermite_function(int(window), grid.x_axis, grid.hbar), int(window)


def stargen_from_eigen(pair: EigenPair, window: Union[int, WaveField],
                       grid: PhaseGrid) -> StarGenPair:
    """``Psi = W_phi psi`` with the eigenvalue of ``psi``; ``window`` is a Hermite index or a field."""
    phi, tag = _window(window, grid)
    big = cross_wigner(WindowedTransform(phi, grid), pair.psi)
    return StarGenPair(pair.eigenvalue, big, tag)


def eigen_from_stargen(sg: StarGenPair, window: Union[int, WaveField],
                       hamiltonian: HamiltonianSpec | None = None) -> EigenPair:
    """``psi = W_phi^* Psi`` normalized.

    With ``hamiltonian`` the eigenvalue is the Rayleigh quotient of ``psi``
    and the residual ``||H psi - lambda psi||`` is reported; otherwise the
    star-genvalue is carried over and the residual is NaN.
    """
    grid = sg.big_psi.grid
    phi, _ = _window(window, grid)
    back = wigner_adjoint(WindowedTransform(phi, grid), sg.big_psi)
    nb, ns = back.norm(), sg.big_psi.norm()
    if nb < ANNIHILATION_TOL * ns:
        raise WindowAnnihilationError(
            f"window annihilates the field (|W*Psi| = {nb:.2e} |Psi|); try another window")
    psi = WaveField(back.grid, _fix_phase(back.values) / nb)
    if hamiltonian is None:
        return EigenPair(sg.eigenvalue, psi, float("nan"))
    a = operator_matrix(hamiltonian, psi.grid, grid.hbar)
    hv = a @ psi.values
    lam = float(np.real(np.vdot(psi.values, hv) * psi.grid.dx))
    res = float(np.linalg.norm(hv - lam * psi.values) * math.sqrt(psi.grid.dx))
    return EigenPair(lam, psi, res)


def apply_star(h: HamiltonianSpec, big_psi: PhaseField) -> PhaseField:
    """``H * Psi``; Bopp shift for polynomials, kernel composition otherwise."""
    grid = big_psi.grid
    if h.kind == "quadratic-1d":
        return bopp_apply(h.polynomial, big_psi)
    return star_product(h.symbol(grid.x_axis), big_psi)


def stargen_residual(h: HamiltonianSpec, sg: StarGenPair) -> float:
    """``||H * Psi - lambda Psi|| / ||Psi||``."""
    r = apply_star(h, sg.big_psi) - sg.big_psi * sg.eigenvalue
    return r.norm() / sg.big_psi.norm()


def expand_in_basis(big_psi: PhaseField, j: int, max_l: int,
                    max_k: int | None = None) -> ExpansionCoefficients:
    """Coefficients ``(Psi | Psi_{j,l})`` for ``l <= max_l`` and the energy left over
    in ``Psi_{k,l}`` with ``k != j``, ``k <= max_k`` (default ``max_l``)."""
    grid = big_psi.grid
    if max_k is None:
        max_k = max_l
    alphas = np.array([inner_product(big_psi, stargen_basis(j, l, grid))
                       for l in range(max_l + 1)])
    cross = 0.0
    for k in range(max_k + 1):
        if k == j:
            continue
        for l in range(max_l + 1):
            cross += abs(inner_product(big_psi, stargen_basis(k, l, grid))) ** 2
    return ExpansionCoefficients(alphas, j, float(cross))


def group_levels(values: Sequence[float], tol: float = 1e-8) -> list[list[int]]:
    """Indices of ascending eigenvalues grouped into clusters closer than ``tol``."""
    groups: list[list[int]] = []
    for i, v in enumerate(values):
        if groups and abs(v - values[groups[-1][-1]]) < tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def finite_difference_levels(potential: Callable[[np.ndarray], np.ndarray],
                             half_width: float, n_interior: int, count: int,
                             mass: float = 1.0, hbar: float = 1.0) -> np.ndarray:
    """Lowest levels of ``-hbar^2/(2m) d^2 + V`` with Dirichlet walls, three-point stencil,
    Richardson-extrapolated from spacings ``h`` and ``h/2``."""
    from scipy.linalg import eigh_tridiagonal

    def levels(m: int) -> np.ndarray:
        h = 2 * half_width / (m + 1)
        x = -half_width + h * np.arange(1, m + 1)
        t = hbar ** 2 / (2 * mass * h * h)
        d = 2 * t + potential(x)
        e = -t * np.ones(m - 1)
        return eigh_tridiagonal(d, e, select="i", select_range=(0, count - 1))[0]

    coarse = levels(n_interior)
    fine = levels(2 * n_interior + 1)       # same walls, half the spacing
    return (4 * fine - coarse) / 3
