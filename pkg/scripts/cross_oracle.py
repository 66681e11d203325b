"""Dual-number curvature against the finite-difference oracle on every catalog metric."""

import argparse

import numpy as np

from motskit.catalog import default_entries, sample_points
from motskit.diffgeo import curvature, fd_curvature_oracle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=20)
    ap.add_argument("--step", type=float, default=5e-4)
    args = ap.parse_args()
    print(f"{'family':>24} {'riemann':>10} {'ricci':>10} {'scalar':>10}")
    for e in default_entries():
        pts = sample_points(e, args.points)
        ad, fd = curvature(e.metric, pts), fd_curvature_oracle(e.metric, pts, args.step)
        dev = [np.max(np.abs(getattr(ad, k) - getattr(fd, k))) for k in ("riemann", "ricci", "scalar")]
        print(f"{e.name:>24} " + " ".join(f"{d:10.2e}" for d in dev))


if __name__ == "__main__":
    main()
