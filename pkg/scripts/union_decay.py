"""Union measure of the length-n sublevel sets against the sum of single-word measures.

For fixed D the threshold is D^(-n^2); the table shows how fast the union
and the union bound fall with n. Monte Carlo with a fixed seed.
"""

import argparse
from dataclasses import dataclass

from diophantine_so3 import UnitQuaternion, phi_union_measure


@dataclass
class UnionConfig:
    D: float = 1.5
    n_max: int = 5
    samples: int = 10**6
    seed: int = 42


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--D", type=float, default=UnionConfig.D)
    ap.add_argument("--n-max", type=int, default=UnionConfig.n_max)
    ap.add_argument("--samples", type=int, default=UnionConfig.samples)
    ap.add_argument("--seed", type=int, default=UnionConfig.seed)
    a = ap.parse_args()
    cfg = UnionConfig(a.D, a.n_max, a.samples, a.seed)
    print("n  threshold     union        +-          sum_individual")
    for n in range(1, cfg.n_max + 1):
        est = phi_union_measure(n, cfg.D, UnitQuaternion.identity(), samples=cfg.samples, seed=cfg.seed)
        print(f"{n}  {est.extra['threshold']:.4e}  {est.value:.4e}  {est.half_width:.2e}  "
              f"{est.extra['sum_individual']:.4e}")


if __name__ == "__main__":
    main()
