"""Measure the constant relating the Laguerre closed form to the cross-Wigner
transform computed by quadrature, for each (j, k).

The closed form zeta-bar^k L_j^k(2|z|^2) e^{-|z|^2} (with its factorial
prefactor) is compared against W_{psi_j} psi_{j+k}; the printed ratio should
be the same for every pair, with a spread far below 1e-6.
"""

import numpy as np

from stargen import PhaseGrid, SpatialGrid, WindowedTransform, cross_wigner, hermite_function
from stargen.special import LAGUERRE_CALIBRATION, laguerre_wigner


def main(max_j: int = 3, max_k: int = 3):
    grid = PhaseGrid.compatible(SpatialGrid.centered(10.0, 128))
    print(f"expected constant {LAGUERRE_CALIBRATION:.15f}")
    print(f"{'j':>2} {'k':>2} {'ratio':>18} {'spread':>10}")
    for j in range(max_j + 1):
        for k in range(max_k + 1):
            quad = cross_wigner(WindowedTransform.hermite(j, grid), hermite_function(j + k, grid.x_axis))
            raw = laguerre_wigner(j, k, grid).values / LAGUERRE_CALIBRATION
            mask = np.abs(raw) > 1e-6 * np.abs(raw).max()
            r = quad.values[mask] / raw[mask]
            print(f"{j:>2} {k:>2} {np.mean(r).real:>18.15f} {np.max(np.abs(r - np.mean(r))):>10.1e}")


if __name__ == "__main__":
    main()
