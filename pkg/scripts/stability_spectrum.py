"""Principal eigenvalue of -Lap + 2<X, grad> + P on the flat 2-torus.

Draws random smooth drift fields and potentials and reports the principal
eigenvalue, the imaginary part of its eigenvalue and the minimum of the
sup-normalized eigenfunction.
"""

import argparse

import numpy as np

from motskit.stability import operator_from_coefficients, principal_eigenvalue
from motskit.torus import TorusGrid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=24)
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    grid = TorusGrid(2, args.grid)
    x, y = grid.nodes.T
    rng = np.random.default_rng(args.seed)
    print(f"{'trial':>5} {'lambda1':>14} {'imag':>10} {'min phi':>10}")
    for k in range(args.trials):
        a = rng.normal(size=(3, 3))
        X = np.stack([a[0, 0] + a[0, 1] * np.sin(x) + a[0, 2] * np.cos(y),
                      a[1, 0] + a[1, 1] * np.cos(x + y) + a[1, 2] * np.sin(2 * y)], axis=-1)
        P = a[2, 0] + a[2, 1] * np.cos(x - y)
        eig = principal_eigenvalue(operator_from_coefficients(grid, np.eye(2), X, P))
        print(f"{k:5d} {eig.lambda1:14.8f} {eig.imag_part:10.2e} {eig.eigenfunction.min():10.4f}")


if __name__ == "__main__":
    main()
