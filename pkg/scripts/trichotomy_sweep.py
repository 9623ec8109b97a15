"""Sweep random strongly diffusive matrices: verdict counts and route agreement by size."""

from __future__ import annotations

import argparse
import random
import time
from collections import Counter
from dataclasses import dataclass

from siphonkit.diffusive import elimination_trichotomy, trichotomy
from siphonkit.generators import random_strongly_diffusive


@dataclass
class Config:
    samples: int = 200
    max_n: int = 8
    seed: int = 0


def main(cfg: Config) -> None:
    rng = random.Random(cfg.seed)
    print("n  samples  KernelNonneg  PositiveCombination  NegativeOrthant  disagreements  seconds")
    for n in range(1, cfg.max_n + 1):
        counts, bad = Counter(), 0
        t0 = time.perf_counter()
        for _ in range(cfg.samples):
            A = random_strongly_diffusive(rng, n)
            lp, el = trichotomy(A), elimination_trichotomy(A)
            counts[lp.kind.value] += 1
            bad += lp.kind is not el.kind or not (lp.check(A) and el.check(A))
        dt = time.perf_counter() - t0
        print(f"{n:<2} {cfg.samples:>8} {counts['KernelNonneg']:>13} {counts['PositiveCombination']:>20} "
              f"{counts['NegativeOrthant']:>16} {bad:>14} {dt:>8.2f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--samples", type=int, default=Config.samples)
    p.add_argument("--max-n", type=int, default=Config.max_n)
    p.add_argument("--seed", type=int, default=Config.seed)
    a = p.parse_args()
    main(Config(a.samples, a.max_n, a.seed))
