"""Run the rank-one descent on random ppt-covariances and tabulate the outcome.

For 1xN shapes every run should end block diagonal. For 2x2 and larger the
minimal point reached from a generic start is usually not a product.

    python scripts/descent_statistics.py --n 200 --shapes 1x1 1x2 1x3 2x2 2x3
"""

import argparse
import warnings
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from gaussppt.phase_space import SystemShape
from gaussppt.sampling import random_local_symplectic, random_ppt_covariance
from gaussppt.separability import PptCovariance, ToleranceWarning, classify, minimize_ppt


@dataclass
class DescentConfig:
    n: int = 100
    seed: int = 0
    shapes: list = field(default_factory=lambda: ["1x1", "1x2", "1x3", "2x2"])


def parse_shape(text):
    f_a, f_b = text.lower().split("x")
    return SystemShape(int(f_a), int(f_b))


def run_shape(shape, cfg, rng):
    steps, verdicts = [], Counter()
    warned = 0
    for _ in range(cfg.n):
        S = random_local_symplectic(shape, rng)
        g = S.T @ random_ppt_covariance(shape, rng) @ S
        _, trace = minimize_ppt(PptCovariance(shape, g))
        steps.append(len(trace))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ToleranceWarning)
            verdicts[classify(g, shape).verdict.value] += 1
        warned += bool(caught)
    return np.array(steps), verdicts, warned


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=DescentConfig.n)
    ap.add_argument("--seed", type=int, default=DescentConfig.seed)
    ap.add_argument("--shapes", nargs="+", default=DescentConfig().shapes)
    args = ap.parse_args()
    cfg = DescentConfig(args.n, args.seed, args.shapes)
    rng = np.random.default_rng(cfg.seed)

    print(f"{'shape':>6} {'steps mean':>10} {'max':>4} {'warned':>6}  verdicts")
    for text in cfg.shapes:
        shape = parse_shape(text)
        steps, verdicts, warned = run_shape(shape, cfg, rng)
        print(f"{text:>6} {steps.mean():10.2f} {steps.max():4d} {warned:6d}  {dict(verdicts)}")


if __name__ == "__main__":
    main()
