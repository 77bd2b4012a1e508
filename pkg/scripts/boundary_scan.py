"""Scan the family across the a = ce boundary.

For each ratio a/(ce) the orbit recipe is evaluated directly (without the
parameter-domain guard) and the smallest eigenvalue of gamma + i sigma is
reported. Below the boundary it is zero up to roundoff, above it negative.

    python scripts/boundary_scan.py --trials 20
"""

import argparse

import numpy as np

from gaussppt.family import FamilyParams, orbit_matrices
from gaussppt.phase_space import SystemShape, standard_symplectic


def min_eig_at(ratio, b, c, e, f, sigma):
    omega, lam = orbit_matrices(FamilyParams(ratio * c * e, b, c, e, f))
    g = np.linalg.solve(omega.T, lam.T).T.real
    g = (g + g.T) / 2
    w = np.linalg.eigvalsh(g + 1j * sigma)
    return w[0] / np.max(np.abs(w))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    sigma = standard_symplectic(SystemShape(2, 2)).sigma
    ratios = [0.5, 0.9, 0.99, 0.999, 1.001, 1.01, 1.1, 2.0]

    params = [np.exp(rng.uniform(np.log(0.2), np.log(5.0), 4)) for _ in range(args.trials)]
    print(f"{'a/ce':>6}  {'min eig / max abs eig':>24}")
    for r in ratios:
        worst = min(min_eig_at(r, *p, sigma) for p in params)
        print(f"{r:6.3f}  {worst:24.3e}")


if __name__ == "__main__":
    main()
