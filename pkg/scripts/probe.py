"""Compare structural persistence verdicts with random mass-action simulations."""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from siphonkit.network import parse_network
from siphonkit.persistence import SimulationError, empirical_persistence_probe

ROOT = Path(__file__).resolve().parent.parent


@dataclass
class Config:
    corpus: Path = ROOT / "corpus"
    trials: int = 10
    t_end: float = 20.0
    seed: int = 0


def main(cfg: Config) -> None:
    for path in sorted(cfg.corpus.glob("*.crn")):
        net = parse_network(path.read_text())
        try:
            rep = empirical_persistence_probe(net, cfg.trials, cfg.t_end, cfg.seed)
        except SimulationError as exc:
            print(f"{path.name:32} simulation failed: {exc}")
            continue
        low = min(t.min_concentration for t in rep.trials)
        trending = sum(t.trending_to_zero for t in rep.trials)
        print(f"{path.name:32} {rep.verdict.value:13} min={low:.3e} trending={trending}/{cfg.trials} "
              f"discrepancies={rep.discrepancies}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trials", type=int, default=Config.trials)
    p.add_argument("--t-end", type=float, default=Config.t_end)
    p.add_argument("--seed", type=int, default=Config.seed)
    a = p.parse_args()
    main(Config(trials=a.trials, t_end=a.t_end, seed=a.seed))
