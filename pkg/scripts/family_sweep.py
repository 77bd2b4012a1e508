"""Sample the five-parameter family and check every member.

    python scripts/family_sweep.py --n 500 --seed 1
"""

import argparse
from collections import Counter
from dataclasses import dataclass

import numpy as np

from gaussppt.family import FamilyParams, build_gamma, verify_family_member


@dataclass
class SweepConfig:
    n: int = 200
    seed: int = 0
    low: float = 0.1
    high: float = 10.0
    margin: float = 0.999


def sample(cfg: SweepConfig, rng):
    while True:
        a, b, c, e, f = np.exp(rng.uniform(np.log(cfg.low), np.log(cfg.high), 5))
        if a < cfg.margin * c * e:
            return FamilyParams(a, b, c, e, f)


def run(cfg: SweepConfig):
    rng = np.random.default_rng(cfg.seed)
    verdicts, failed = Counter(), Counter()
    gaps = []
    for _ in range(cfg.n):
        p = sample(cfg, rng)
        g = build_gamma(p)
        r = verify_family_member(g)
        verdicts[r.verdict] += 1
        failed.update(r.failures)
        # smallest nonzero eigenvalue of gamma + i sigma, relative to the largest
        w = r.eigenvalues
        gaps.append(w[2] / w[-1])
    return verdicts, failed, np.array(gaps)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=SweepConfig.n)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    args = ap.parse_args()
    cfg = SweepConfig(n=args.n, seed=args.seed)

    verdicts, failed, gaps = run(cfg)
    print(f"members: {cfg.n}")
    for v, k in sorted(verdicts.items()):
        print(f"  verdict {v}: {k}")
    print(f"failed checks: {dict(failed) or 'none'}")
    print(f"spectral gap (lambda_3 / lambda_max): min {gaps.min():.2e}, median {np.median(gaps):.2e}")


if __name__ == "__main__":
    main()
