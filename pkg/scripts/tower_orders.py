"""Vanishing orders of the commutator towers at alpha -> 0.

Prints the squared-distance and distance slopes for k = 0..k_max, the
-log10 distance at the smallest alpha against sqrt(n) = 2^k, and
optionally the slopes for every non-collapsing sign vector at one level.
"""

import argparse
import json
from dataclasses import dataclass

from diophantine_so3 import degenerate_order
from diophantine_so3.search import explore_tower_signs, tower_growth_record


@dataclass
class TowerConfig:
    beta: float = 1.0
    gamma: float = 1.2
    k_max: int = 3
    explore_level: int = -1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta", type=float, default=TowerConfig.beta)
    ap.add_argument("--gamma", type=float, default=TowerConfig.gamma)
    ap.add_argument("--k-max", type=int, default=TowerConfig.k_max)
    ap.add_argument("--explore-level", type=int, default=TowerConfig.explore_level,
                    help="level whose sign vectors are all fitted (slow at 3)")
    a = ap.parse_args()
    cfg = TowerConfig(a.beta, a.gamma, a.k_max, a.explore_level)
    print("k  length  slope(|W-Id|^2)  slope(|W-Id|)  2^k")
    for k in range(cfg.k_max + 1):
        f = degenerate_order(k, cfg.beta, cfg.gamma)
        print(f"{k}  {4**k:6d}  {f.slope_squared:15.4f}  {f.slope_distance:13.4f}  {2**k}")
    print(json.dumps(tower_growth_record(cfg.beta, cfg.gamma, cfg.k_max), indent=2))
    if cfg.explore_level >= 0:
        rows = explore_tower_signs(cfg.explore_level, cfg.beta, cfg.gamma)
        slopes = sorted({round(r["slope_squared"], 2) for r in rows})
        print(f"level {cfg.explore_level}: {len(rows)} sign vectors, squared-distance slopes {slopes}")


if __name__ == "__main__":
    main()
