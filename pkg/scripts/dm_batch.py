"""Batch check of the polynomial sublevel-set bound on random integer polynomials."""

import argparse
from dataclasses import dataclass

import numpy as np

from diophantine_so3 import check_dm_lemma


@dataclass
class DMConfig:
    count: int = 1000
    max_degree: int = 10
    seed: int = 0
    resolution: int = 10**5


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=DMConfig.count)
    ap.add_argument("--max-degree", type=int, default=DMConfig.max_degree)
    ap.add_argument("--seed", type=int, default=DMConfig.seed)
    ap.add_argument("--resolution", type=int, default=DMConfig.resolution)
    a = ap.parse_args()
    cfg = DMConfig(a.count, a.max_degree, a.seed, a.resolution)
    rng = np.random.default_rng(cfg.seed)
    eps_values = [10.0**-k for k in range(2, 9)]
    worst = {e: 0.0 for e in eps_values}
    violations = 0
    for _ in range(cfg.count):
        deg = int(rng.integers(1, cfg.max_degree + 1))
        coeffs = [int(v) for v in rng.integers(-9, 10, size=deg + 1)]
        coeffs[-1] = coeffs[-1] or 1
        for eps in eps_values:
            rep = check_dm_lemma(coeffs, (-1.0, 1.0), eps, cfg.resolution)
            violations += not rep["ok"]
            worst[eps] = max(worst[eps], rep["measured"] / rep["bound"])
    print(f"{cfg.count} polynomials, {violations} violations")
    for eps, ratio in worst.items():
        print(f"eps {eps:.0e}: max measured/bound {ratio:.4f}")


if __name__ == "__main__":
    main()
