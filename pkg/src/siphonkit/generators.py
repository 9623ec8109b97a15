"""Seeded random instances for property suites and sweeps."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .network import Complex, Reaction, ReactionNetwork, Species
from .rational import RationalMatrix


@dataclass
class NetworkConfig:
    max_species: int = 6
    max_coeff: int = 3
    max_reactions: int = 6
    min_species: int = 1
    p_zero: float = 0.5  # chance that a coefficient is zero


def _complex(rng: random.Random, n: int, cfg: NetworkConfig) -> Complex:
    return Complex((i, rng.randint(1, cfg.max_coeff)) for i in range(n) if rng.random() > cfg.p_zero)


def _assemble(n: int, pairs) -> ReactionNetwork:
    species = tuple(Species(i, f"S{i}") for i in range(n))
    seen, reactions = set(), []
    for y, yp in pairs:
        if y != yp and (y, yp) not in seen:
            seen.add((y, yp))
            reactions.append(Reaction(y, yp))
    return ReactionNetwork(species, tuple(reactions))


def random_network(rng: random.Random, cfg: NetworkConfig = NetworkConfig()) -> ReactionNetwork:
    n = rng.randint(cfg.min_species, cfg.max_species)
    m = rng.randint(1, cfg.max_reactions)
    pairs = []
    while len(pairs) < m:
        y, yp = _complex(rng, n, cfg), _complex(rng, n, cfg)
        if y != yp:
            pairs.append((y, yp))
    return _assemble(n, pairs)


def random_weakly_reversible(rng: random.Random, cfg: NetworkConfig = NetworkConfig()) -> ReactionNetwork:
    """Union of random directed cycles on random complexes."""
    n = rng.randint(cfg.min_species, cfg.max_species)
    pool = list({_complex(rng, n, cfg) for _ in range(rng.randint(2, 6))})
    while len(pool) < 2:
        pool.append(_complex(rng, n, cfg))
        pool = list(set(pool))
    pairs = []
    for _ in range(rng.randint(1, 3)):
        cyc = rng.sample(pool, rng.randint(2, len(pool)))
        pairs += [(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))]
    return _assemble(n, pairs)


def _fit_diagonal(A: list[list[Fraction]], v: list[Fraction]) -> None:
    n = len(A)
    for i in range(n):
        A[i][i] = -sum(A[i][j] * v[j] for j in range(n) if j != i) / v[i]


def random_strongly_diffusive(rng: random.Random, n: int, mode: str | None = None) -> RationalMatrix:
    """Positive off-diagonal, negative diagonal.

    ``mode`` picks the structure: ``rand`` (arbitrary diagonal), ``kernel``
    (positive kernel vector), ``mixed`` (kernel vector of mixed sign, n >= 4),
    ``dom`` (weakly diagonally dominant columns).
    """
    if mode is None:
        modes = ["rand", "kernel", "dom"] + (["mixed"] if n >= 4 else [])
        mode = rng.choice(modes) if n > 1 else "rand"
    if (mode == "kernel" and n < 2) or (mode == "mixed" and n < 4):
        raise ValueError(f"mode {mode!r} needs a larger matrix")
    while True:
        A = [[Fraction(rng.randint(1, 5)) for _ in range(n)] for _ in range(n)]
        if mode == "rand":
            for i in range(n):
                A[i][i] = -Fraction(rng.randint(1, 5 * n))
        elif mode == "kernel":
            v = [Fraction(rng.randint(1, 4)) for _ in range(n)]
            _fit_diagonal(A, v)
        elif mode == "mixed":
            # two or more coordinates of each sign, so every row can be made
            # to push its own sign by boosting same-sign entries
            k = rng.randint(2, n - 2)
            signs = [1] * k + [-1] * (n - k)
            rng.shuffle(signs)
            v = [Fraction(s * rng.randint(1, 4)) for s in signs]
            for i in range(n):
                same = [j for j in range(n) if j != i and signs[j] == signs[i]]
                own = sum(A[i][j] * abs(v[j]) for j in same)
                other = sum(A[i][j] * abs(v[j]) for j in range(n) if j != i and signs[j] != signs[i])
                factor = other // own + 1
                for j in same:
                    A[i][j] *= factor
            _fit_diagonal(A, v)
        else:
            for i in range(n):
                A[i][i] = -sum(A[i][j] for j in range(n) if j != i) - rng.randint(0, 2)
        if all(A[i][i] < 0 for i in range(n)):
            return RationalMatrix(A)
