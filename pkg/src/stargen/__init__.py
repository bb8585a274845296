"""Phase-space quantization on a lattice."""

from .errors import (ConfigurationError, DomainError, GridMismatchError,
                     NumericalContractError, StargenError, UnsupportedError,
                     WindowAnnihilationError)
from .grids import (PhaseField, PhaseGrid, SpatialGrid, SymplecticVector, WaveField,
                    inner_product, symplectic_form, symplectic_fourier)
from .moyal import (PolynomialSymbol, WeylKernel, bopp_apply, heisenberg_weyl,
                    kinetic_plus_potential, moyal_polynomial, oscillator_symbol,
                    p_symbol, phase_translate, star_operator_kernel, star_product,
                    star_product_direct, star_product_twisted, symbol_of,
                    weyl_apply_covariant, weyl_matrix, x_symbol)
from .special import (hermite_function, hermite_normalization, hermite_poly,
                      laguerre_poly, laguerre_wigner)
from .spectral import (EigenPair, ExpansionCoefficients, HamiltonianSpec, StarGenPair,
                       eigen_from_stargen, eigensolve, expand_in_basis,
                       stargen_from_eigen, stargen_residual)
from .symplectic import (SymplecticDecomposition, continuous_spectrum_check,
                         gaussian_decay_check, quadratic_spectrum,
                         symplectic_covariance_check, williamson)
from .wigner import (WindowedTransform, cross_wigner, moyal_identity_check, projection,
                     stargen_basis, wigner_adjoint, wigner_distribution)

__all__ = [
    "ConfigurationError",
    "DomainError",
    "EigenPair",
    "ExpansionCoefficients",
    "GridMismatchError",
    "HamiltonianSpec",
    "NumericalContractError",
    "PhaseField",
    "PhaseGrid",
    "PolynomialSymbol",
    "SpatialGrid",
    "StarGenPair",
    "StargenError",
    "SymplecticDecomposition",
    "SymplecticVector",
    "UnsupportedError",
    "WaveField",
    "WeylKernel",
    "WindowAnnihilationError",
    "WindowedTransform",
    "bopp_apply",
    "continuous_spectrum_check",
    "cross_wigner",
    "eigen_from_stargen",
    "eigensolve",
    "expand_in_basis",
    "gaussian_decay_check",
    "heisenberg_weyl",
    "hermite_function",
    "hermite_normalization",
    "hermite_poly",
    "inner_product",
    "kinetic_plus_potential",
    "laguerre_poly",
    "laguerre_wigner",
    "moyal_identity_check",
    "moyal_polynomial",
    "oscillator_symbol",
    "p_symbol",
    "phase_translate",
    "projection",
    "quadratic_spectrum",
    "star_operator_kernel",
    "star_product",
    "star_product_direct",
    "star_product_twisted",
    "stargen_basis",
    "stargen_from_eigen",
    "stargen_residual",
    "symbol_of",
    "symplectic_covariance_check",
    "symplectic_form",
    "symplectic_fourier",
    "weyl_apply_covariant",
    "weyl_matrix",
    "wigner_adjoint",
    "wigner_distribution",
    "williamson",
    "x_symbol",
]
