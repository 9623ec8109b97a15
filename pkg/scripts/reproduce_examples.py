"""Print the structural analysis of every network in corpus/."""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from siphonkit.network import parse_network
from siphonkit.pathways import find_catalytic_sets
from siphonkit.persistence import certify

ROOT = Path(__file__).resolve().parent.parent


@dataclass
class Config:
    corpus: Path = ROOT / "corpus"
    catalysis: bool = True


def main(cfg: Config) -> None:
    for path in sorted(cfg.corpus.glob("*.crn")):
        net = parse_network(path.read_text())
        cert = certify(net)
        print(f"== {path.name}")
        for c in cert.siphons:
            flags = " ".join(k if v else f"¬{k}" for k, v in c.flags().items())
            print(f"  minimal siphon {{{','.join(net.set_names(c.species))}}}: {flags}")
        print(f"  persistence: {cert.verdict.value} ({cert.rule.value})")
        if cfg.catalysis and net.is_chemical():
            for f in find_catalytic_sets(net):
                print(f"  catalysis {{{','.join(net.set_names(f.species))}}}: {f.kind.value}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--corpus", type=Path, default=Config.corpus)
    p.add_argument("--no-catalysis", action="store_true")
    a = p.parse_args()
    main(Config(a.corpus, not a.no_catalysis))
