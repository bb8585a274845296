"""Solve the harmonic oscillator, build star-genfunctions with several windows
and print residuals and the round-trip error.

    python scripts/oscillator_demo.py [--count 5] [--windows 0 1 2]
"""

import argparse

from stargen import (HamiltonianSpec, PhaseGrid, SpatialGrid, eigen_from_stargen, eigensolve,
                     stargen_from_eigen, stargen_residual)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=5)
    ap.add_argument("--windows", type=int, nargs="*", default=[0, 1, 2])
    ap.add_argument("--half-width", type=float, default=12.0)
    ap.add_argument("--points", type=int, default=256)
    args = ap.parse_args()

    grid = PhaseGrid.compatible(SpatialGrid.centered(args.half_width, args.points))
    h = HamiltonianSpec.oscillator()
    print(f"{'j':>2} {'lambda':>16} {'window':>6} {'star residual':>14} {'round trip':>11}")
    for j, pair in enumerate(eigensolve(h, grid.x_axis, count=args.count)):
        for l in args.windows:
            sg = stargen_from_eigen(pair, l, grid)
            back = eigen_from_stargen(sg, l, h)
            rt = min((back.psi - pair.psi * s).max_abs() for s in (1, -1))
            print(f"{j:>2} {pair.eigenvalue:>16.12f} {l:>6} {stargen_residual(h, sg):>14.2e} {rt:>11.2e}")


if __name__ == "__main__":
    main()
