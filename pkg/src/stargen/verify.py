"""Invariant suites behind ``stargen verify``.

Every check is deterministic (fixed seeds, fixed grids) and reports the
measured error next to its tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .grids import PhaseField, PhaseGrid, SpatialGrid, SymplecticVector, symplectic_fourier
from .moyal import (bopp_apply, heisenberg_weyl, moyal_polynomial, oscillator_symbol,
                    p_symbol, phase_translate, star_product, star_product_direct,
                    weyl_matrix, x_symbol)
from .special import hermite_function, laguerre_wigner
from .spectral import (HamiltonianSpec, eigen_from_stargen, eigensolve, expand_in_basis,
                       finite_difference_levels, stargen_from_eigen, stargen_residual)
from .symplectic import (compact_support_probe, continuous_spectrum_check,
                         gaussian_decay_check, quadratic_spectrum, symplectic_eigenvalues,
                         symplectic_matrix, williamson)
from .wigner import (WindowedTransform, cross_wigner, gaussian_wigner, moyal_identity_check,
                     stargen_basis, wigner_adjoint)

SUITES = ("fourier", "wigner", "star", "spectral", "williamson", "decay")


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    measured: float
    tolerance: float
    passed: bool
    # for lower-bound checks the measured value must exceed the tolerance
    lower_bound: bool = False

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        rel = ">" if self.lower_bound else "<"
        return (f"{verdict}  {self.suite}/{self.name}  measured={self.measured:.2e}"
                f"  required {rel} {self.tolerance:.0e}")


def _check(suite: str, name: str, measured: float, tol: float,
           lower_bound: bool = False) -> CheckResult:
    measured = float(measured)
    ok = measured > tol if lower_bound else measured < tol
    return CheckResult(suite, name, measured, tol, bool(ok and math.isfinite(measured)), lower_bound)


def band_limited_field(grid: PhaseGrid, rng: np.random.Generator, modes: int = 6,
                       width: float = 0.25) -> PhaseField:
    """Random smooth field: a few low Fourier modes under a Gaussian envelope.

    The envelope has ``width`` times the grid half-widths as its 1/e radius,
    so the field is ~1e-7 at the edges and products do not wrap around.
    """
    X, P = grid.mesh()
    lx, lp = grid.x_axis.x_max, grid.p_axis.x_max
    vals = np.zeros(grid.shape, dtype=complex)
    for _ in range(modes):
        kx, kp = rng.uniform(-2, 2, size=2)
        c = complex(*rng.normal(size=2))
        vals += c * np.exp(1j * (kx * X + kp * P))
    vals *= np.exp(-(X / (width * lx)) ** 2 - (P / (width * lp)) ** 2)
    return PhaseField(grid, vals).normalized()


# ------------------------------------------------------------------ suites

def suite_fourier() -> Iterator[CheckResult]:
    rng = np.random.default_rng(1)
    grid = PhaseGrid.compatible_square(128)
    f = band_limited_field(grid, rng)
    ff = symplectic_fourier(f)
    yield _check("fourier", "involution", (symplectic_fourier(ff) - f).max_abs(), 1e-12)
    yield _check("fourier", "unitarity", abs(ff.norm() - f.norm()), 1e-12)
    g0 = PhaseField.from_function(grid, lambda x, p: np.exp(-(x * x + p * p) / (2 * grid.hbar)))
    yield _check("fourier", "gaussian_fixed_point", (symplectic_fourier(g0) - g0).max_abs(), 1e-12)


def suite_wigner() -> Iterator[CheckResult]:
    grid = PhaseGrid.compatible(SpatialGrid.centered(10.0, 128))
    t0 = WindowedTransform.hermite(0, grid)
    psi0 = hermite_function(0, grid.x_axis)
    yield _check("wigner", "gaussian_closed_form",
                 (cross_wigner(t0, psi0) - gaussian_wigner(grid)).max_abs(), 1e-12)
    iso = max(abs(cross_wigner(WindowedTransform.hermite(l, grid),
                               hermite_function(k, grid.x_axis)).norm() - 1.0)
              for k in range(4) for l in range(4))
    yield _check("wigner", "isometry", iso, 1e-10)
    worst = 0.0
    for a in range(3):
        for b in range(3):
            for c in range(3):
                for d in range(3):
                    h = [hermite_function(i, grid.x_axis) for i in (a, b, c, d)]
                    lhs, rhs = moyal_identity_check(h[0], h[1], h[2], h[3], grid)
                    worst = max(worst, abs(lhs - rhs))
    yield _check("wigner", "moyal_identity", worst, 1e-8)
    wide = PhaseGrid.compatible(SpatialGrid.centered(12.0, 128))
    t2 = WindowedTransform.hermite(2, wide)
    psi3 = hermite_function(3, wide.x_axis)
    back = wigner_adjoint(t2, cross_wigner(t2, psi3))
    yield _check("wigner", "adjoint_inverts", (back - psi3).max_abs(), 1e-9)
    lag = max((cross_wigner(WindowedTransform.hermite(j, grid), hermite_function(j + k, grid.x_axis))
               - laguerre_wigner(j, k, grid)).max_abs() for j in range(3) for k in range(3))
    yield _check("wigner", "laguerre_closed_form", lag, 1e-10)


def suite_star() -> Iterator[CheckResult]:
    grid = PhaseGrid.compatible(SpatialGrid.centered(8.0, 64))
    x, p = x_symbol().sample(grid), p_symbol().sample(grid)
    comm = star_product(x, p) - star_product(p, x)
    yield _check("star", "commutator_ih", (comm - PhaseField.constant(grid, 1j * grid.hbar)).max_abs(),
                 1e-10)
    X, P = grid.mesh()
    a = PhaseField(grid, np.exp(-0.5 * (X * X + P * P)) * (1 + 0.3j * X))
    b = PhaseField(grid, np.exp(-0.4 * ((X - 0.5) ** 2 + P * P)))
    one = PhaseField.constant(grid, 1.0)
    yield _check("star", "unit", (star_product(a, one) - a).max_abs(), 1e-9)
    ab = star_product(a, b)
    lhs = weyl_matrix(ab).matrix
    rhs = weyl_matrix(a).matrix @ weyl_matrix(b).matrix
    yield _check("star", "homomorphism", np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)), 1e-6)
    rng = np.random.default_rng(9)
    fa, fb = band_limited_field(grid, rng), band_limited_field(grid, rng)
    lhs = weyl_matrix(star_product(fa, fb)).values
    rhs = weyl_matrix(fa).values @ weyl_matrix(fb).values * grid.dx
    yield _check("star", "homomorphism_band_limited",
                 np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)), 1e-6)
    yield _check("star", "conjugation",
                 (star_product(a, b).conj() - star_product(b.conj(), a.conj())).max_abs(), 1e-10)
    h = oscillator_symbol()
    exact = moyal_polynomial(h, x_symbol() * p_symbol(), grid.hbar).sample(grid)
    yield _check("star", "polynomial_series", (star_product(h, x_symbol() * p_symbol(), grid)
                                               - exact).max_abs(), 1e-12)
    g32 = PhaseGrid.compatible_square(32)
    X, P = g32.mesh()
    ga = PhaseField(g32, np.exp(-0.5 * (X * X + P * P)))
    gb = PhaseField(g32, np.exp(-1.0 * (X * X + P * P)))
    comp = star_product(ga, gb, refine_factor=2)
    direct = star_product_direct(ga, gb, refine_factor=4)
    yield _check("star", "direct_quadrature_32", (comp - direct).max_abs() / direct.max_abs(), 1e-6)
    psi = stargen_basis(2, 1, grid)
    yield _check("star", "bopp_vs_kernel",
                 (bopp_apply(h, psi) - star_product(h.sample(grid), psi)).max_abs(), 1e-4)


def suite_spectral() -> Iterator[CheckResult]:
    osc = HamiltonianSpec.oscillator()
    g512 = SpatialGrid.centered(10.0, 512)
    pairs = eigensolve(osc, g512, count=8)
    yield _check("spectral", "oscillator_levels",
                 max(abs(pr.eigenvalue - (k + 0.5)) for k, pr in enumerate(pairs)), 1e-8)
    yield _check("spectral", "hermite_eigenvectors",
                 max(min((pr.psi - hermite_function(k, g512) * s).max_abs() for s in (1, -1))
                     for k, pr in enumerate(pairs)), 1e-7)
    quartic = HamiltonianSpec.kinetic_potential(lambda x: x ** 4, label="quartic")
    q = eigensolve(quartic, g512, count=5)
    fd = finite_difference_levels(lambda x: x ** 4, 6.0, 2000, 5)
    yield _check("spectral", "quartic_vs_finite_difference",
                 float(np.max(np.abs(np.array([pr.eigenvalue for pr in q]) - fd))), 1e-5)

    grid = PhaseGrid.compatible(SpatialGrid.centered(12.0, 256))
    res = rt = lam = 0.0
    for h in (osc, quartic):
        for pr in eigensolve(h, grid.x_axis, count=3):
            for l in (0, 2, 4):
                sg = stargen_from_eigen(pr, l, grid)
                res = max(res, stargen_residual(h, sg))
                back = eigen_from_stargen(sg, l, h)
                rt = max(rt, min((back.psi - pr.psi * s).max_abs() for s in (1, -1)))
                lam = max(lam, abs(back.eigenvalue - pr.eigenvalue))
    yield _check("spectral", "stargen_residual", res, 1e-6)
    yield _check("spectral", "round_trip_state", rt, 1e-7)
    yield _check("spectral", "round_trip_eigenvalue", lam, 1e-6)
    cross = max(expand_in_basis(stargen_basis(j, 1, grid), j, 5).cross_energy for j in range(3))
    yield _check("spectral", "expansion_cross_energy", cross, 1e-8)


def suite_williamson() -> Iterator[CheckResult]:
    rng = np.random.default_rng(7)
    sym = dec = om = spacing = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 4))
        a = rng.normal(size=(2 * n, 2 * n))
        m = a @ a.T + 0.5 * np.eye(2 * n)
        w = williamson(m)
        j = symplectic_matrix(n)
        sym = max(sym, np.max(np.abs(w.S.T @ j @ w.S - j)))
        dec = max(dec, np.max(np.abs(w.S.T @ w.D @ w.S - m)))
        om = max(om, np.max(np.abs(np.sort(w.omegas) - symplectic_eigenvalues(m))))
        base = [0] * n
        lv = quadratic_spectrum(m, [base] + [[int(i == k) for i in range(n)] for k in range(n)])
        spacing = max(spacing, max(abs(lv[k + 1] - lv[0] - w.omegas[k]) for k in range(n)))
    yield _check("williamson", "symplectic", sym, 1e-10)
    yield _check("williamson", "decomposition", dec, 1e-10)
    yield _check("williamson", "symplectic_eigenvalues", om, 1e-10)
    yield _check("williamson", "level_spacing", spacing, 1e-10)


def suite_decay() -> Iterator[CheckResult]:
    grid = PhaseGrid.compatible(SpatialGrid.centered(16.0, 256))
    fits = gaussian_decay_check([0.5, 1.0, 2.0], grid)
    matched = max(abs(f.product - 1) for f in fits if f.s_psi == f.s_phi)
    yield _check("decay", "matched_product", matched, 1e-6)
    excess = max(f.product - 1 for f in fits)
    yield _check("decay", "product_bound", max(excess, 0.0), 1e-9)
    small = PhaseGrid.compatible(SpatialGrid.centered(8.0, 64))
    yield _check("decay", "compact_support_probe", compact_support_probe(small), 1e-3,
                 lower_bound=True)
    worst = max(continuous_spectrum_check(case, e, small)
                for case in ("momentum", "position") for e in (-1.0, 0.0, 1.0, 2.5))
    yield _check("decay", "continuous_spectrum", worst, 1e-12)


SUITE_FUNCS: dict[str, Callable[[], Iterator[CheckResult]]] = {
    "fourier": suite_fourier,
    "wigner": suite_wigner,
    "star": suite_star,
    "spectral": suite_spectral,
    "williamson": suite_williamson,
    "decay": suite_decay,
}


def run_suite(name: str) -> list[CheckResult]:
    if name == "all":
        return [r for s in SUITES for r in SUITE_FUNCS[s]()]
    if name not in SUITE_FUNCS:
        raise KeyError(name)
    return list(SUITE_FUNCS[name]())


def translation_relation_errors(grid: PhaseGrid, pairs, field: PhaseField) -> tuple[float, float]:
    """Max errors of the composition and commutation phases of ``T~`` on ``field``."""
    h = grid.hbar
    comp = comm = 0.0
    for z0, z1 in pairs:
        s = z0.p * z1.x - z1.p * z0.x
        a = phase_translate(z0 + z1, field)
        b = phase_translate(z0, phase_translate(z1, field)) * np.exp(-0.5j * s / h)
        comp = max(comp, (a - b).max_abs())
        c = phase_translate(z1, phase_translate(z0, field))
        d = phase_translate(z0, phase_translate(z1, field)) * np.exp(-1j * s / h)
        comm = max(comm, (c - d).max_abs())
    return comp, comm


def intertwining_error(grid: PhaseGrid, z0: SymplecticVector, k: int, l: int) -> float:
    """``max |W_phi(T(z0) psi) - T~(z0) W_phi psi|`` with Hermite ``psi_k`` and window ``psi_l``."""
    t = WindowedTransform.hermite(l, grid)
    psi = hermite_function(k, grid.x_axis, grid.hbar)
    lhs = cross_wigner(t, heisenberg_weyl(z0, psi, grid.hbar))
    rhs = phase_translate(z0, cross_wigner(t, psi))
    return (lhs - rhs).max_abs()


__all__ = ["CheckResult", "SUITES", "run_suite", "band_limited_field",
           "translation_relation_errors", "intertwining_error"]
