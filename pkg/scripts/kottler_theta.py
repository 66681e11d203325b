"""Null expansion of the r-tori in toroidal Kottler data with K = -g.

Prints r, the computed theta and the closed form 2(sqrt(1 - 2m/r^3) - 1)
for n = 3.  Every value is negative: the slices are outer trapped.
"""

import argparse

import numpy as np

from motskit.catalog import make_toroidal_kottler
from motskit.hypersurface import null_expansion
from motskit.initial_data import make_umbilic_data


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=float, default=0.5)
    ap.add_argument("--samples", type=int, default=12)
    args = ap.parse_args()
    e = make_toroidal_kottler(3, args.m)
    ids = make_umbilic_data(e.metric, 1.0, -1)
    print(f"{'r':>8} {'theta':>14} {'closed form':>14}")
    for r in np.linspace(e.boundary.value * 1.01, 3.0, args.samples):
        s = e.level_surface(float(r))
        theta = null_expansion(s, ids, s.fiber_grid(8)[0]).theta.mean()
        exact = 2.0 * (np.sqrt(1.0 - 2.0 * args.m / r**3) - 1.0)
        print(f"{r:8.4f} {theta:14.10f} {exact:14.10f}")


if __name__ == "__main__":
    main()
