"""Siphons, closed sets, criticality, drainability and self-replicability.

Drainable and self-replicable sets are decided through cone feasibility on
the stoichiometric matrix: ``T`` is self-replicable iff some ``a >= 0`` has
``(a Gamma)_i >= 1`` for every ``i`` in ``T``. The pathway that realises such
an ``a`` is built by :func:`siphonkit.pathways.witness_from_coefficients`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .feasibility import GE, LE, FeasibilitySystem, solve_feasibility
from .network import (
    ConservationLaw,
    ReactionNetwork,
    opposite_network,
    positive_conservation_law,
    positive_conservation_refutation,
)
from .rational import Vector


class InvariantViolation(AssertionError):
    pass


def _nonempty(net: ReactionNetwork, T: Iterable[int]) -> frozenset[int]:
    T = net.check_subset(T)
    if not T:
        raise ValueError("species set must be non-empty")
    return T


def siphon_violation(net: ReactionNetwork, T: Iterable[int]) -> int | None:
    """Index of the first reaction producing a ``T`` species without consuming one."""
    T = net.check_subset(T)
    for k, r in enumerate(net.reactions):
        if r.product.support() & T and not r.reactant.support() & T:
            return k
    return None


def is_siphon(net: ReactionNetwork, T: Iterable[int]) -> bool:
    return siphon_violation(net, T) is None


def closed_violation(net: ReactionNetwork, T: Iterable[int]) -> int | None:
    """Index of the first reaction leaving ``T`` from a reactant inside ``T``."""
    T = net.check_subset(T)
    for k, r in enumerate(net.reactions):
        if r.reactant.support() <= T and not r.product.support() <= T:
            return k
    return None


def is_closed(net: ReactionNetwork, T: Iterable[int]) -> bool:
    return closed_violation(net, T) is None


def closure(net: ReactionNetwork, T: Iterable[int]) -> frozenset[int]:
    """Smallest closed set containing ``T``."""
    cl = set(net.check_subset(T))
    changed = True
    while changed:
        changed = False
        for r in net.reactions:
            if r.reactant.support() <= cl and not r.product.support() <= cl:
                cl |= r.product.support()
                changed = True
    return frozenset(cl)


def complement_duality_check(net: ReactionNetwork, T: Iterable[int]) -> bool:
    T = net.check_subset(T)
    rest = frozenset(range(net.n_species)) - T
    return is_siphon(net, T) == is_closed(net, rest)


def largest_siphon_avoiding(net: ReactionNetwork, U: Iterable[int]) -> frozenset[int]:
    """Largest siphon disjoint from ``U``: the complement of ``Cl(U)``."""
    return frozenset(range(net.n_species)) - closure(net, U)


def is_critical(net: ReactionNetwork, T: Iterable[int]) -> bool:
    return positive_conservation_law(net, _nonempty(net, T)) is None


def is_critical_point(net: ReactionNetwork, z) -> bool:
    """Does ``z + H`` meet the open positive orthant?"""
    z = [Fraction(x) for x in z]
    if len(z) != net.n_species:
        raise ValueError("point has the wrong dimension")
    if any(x < 0 for x in z):
        raise ValueError("critical points are non-negative")
    zeros = frozenset(i for i, x in enumerate(z) if x == 0)
    return is_critical(net, zeros) if zeros else True


def _growth_system(net: ReactionNetwork, T: frozenset[int], sign: int) -> FeasibilitySystem:
    G = net.gamma
    sys = FeasibilitySystem.nonnegative(G.shape[0])
    for i in sorted(T):
        if sign > 0:
            sys.add_ineq(G.column(i), GE, 1)
        else:
            sys.add_ineq(G.column(i), LE, -1)
    return sys


def _growth(net: ReactionNetwork, T: frozenset[int], sign: int) -> tuple[Vector | None, Vector | None]:
    """(coefficients, None) when feasible, else (None, blocking weight on species).

    The blocking weight ``u >= 0``, ``u != 0``, supported on ``T``, satisfies
    ``sign * (Gamma u) <= 0``, so no pathway moves every ``T`` coordinate in
    the requested direction.
    """
    res = solve_feasibility(_growth_system(net, T, sign))
    if res:
        return res.point, None
    u = [Fraction(0)] * net.n_species
    for i, lam in zip(sorted(T), res.farkas.ineq):
        u[i] = abs(lam)
    return None, tuple(u)


def self_replication_certificate(net: ReactionNetwork, T: Iterable[int]) -> Vector | None:
    """Reaction coefficients ``a >= 0`` with ``(a Gamma)_i >= 1`` on ``T``, or None."""
    return _growth(net, _nonempty(net, T), +1)[0]


def drain_certificate(net: ReactionNetwork, T: Iterable[int]) -> Vector | None:
    """Reaction coefficients ``a >= 0`` with ``(a Gamma)_i <= -1`` on ``T``, or None."""
    return _growth(net, _nonempty(net, T), -1)[0]


def is_self_replicable(net: ReactionNetwork, T: Iterable[int]) -> bool:
    return self_replication_certificate(net, T) is not None


def is_drainable(net: ReactionNetwork, T: Iterable[int]) -> bool:
    return drain_certificate(net, T) is not None


def is_drainable_via_opposite(net: ReactionNetwork, T: Iterable[int]) -> bool:
    return is_self_replicable(opposite_network(net), T)


def minimal_siphons(net: ReactionNetwork) -> list[frozenset[int]]:
    """All inclusion-minimal non-empty siphons.

    From each root species, candidates grow by repairing the first violating
    reaction with one of its reactant species. Every minimal siphon holding
    the root stays reachable, since it must contain some species of that
    reactant.
    """
    found: set[frozenset[int]] = set()
    for root in range(net.n_species):
        queue = deque([frozenset([root])])
        seen = {queue[0]}
        while queue:
            T = queue.popleft()
            if any(F <= T for F in found if F != T):
                continue
            k = siphon_violation(net, T)
            if k is None:
                found.add(T)
                continue
            for s in sorted(net.reactions[k].reactant.support()):
                nxt = T | {s}
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    minimal = [T for T in found if not any(F < T for F in found)]
    return sorted(minimal, key=lambda T: (len(T), sorted(T)))


def minimal_siphons_bruteforce(net: ReactionNetwork) -> list[frozenset[int]]:
    n = net.n_species
    siphons = [frozenset(c) for k in range(1, n + 1) for c in combinations(range(n), k) if is_siphon(net, c)]
    minimal = [T for T in siphons if not any(F < T for F in siphons)]
    return sorted(minimal, key=lambda T: (len(T), sorted(T)))


@dataclass(frozen=True)
class SetClassification:
    """Flags for one species set, each backed by a checkable certificate.

    ``conservation_law`` refutes criticality; ``gordan`` proves it
    (``(v Gamma)_i >= 1`` on ``T``). ``self_replication`` / ``drain`` are
    reaction coefficients; ``no_growth`` / ``no_drain`` are blocking species
    weights. ``siphon_violation`` / ``closed_violation`` are reaction indices.
    """

    species: frozenset[int]
    is_siphon: bool
    is_closed: bool
    is_critical: bool
    is_drainable: bool
    is_self_replicable: bool
    siphon_violation: int | None = None
    closed_violation: int | None = None
    conservation_law: ConservationLaw | None = None
    gordan: Vector | None = None
    self_replication: Vector | None = None
    no_growth: Vector | None = None
    drain: Vector | None = None
    no_drain: Vector | None = None

    def __post_init__(self):
        if (self.is_drainable or self.is_self_replicable) and not self.is_critical:
            raise InvariantViolation(f"drainable/self-replicable but not critical: {sorted(self.species)}")

    def flags(self) -> dict[str, bool]:
        return {
            "siphon": self.is_siphon,
            "closed": self.is_closed,
            "critical": self.is_critical,
            "drainable": self.is_drainable,
            "self_replicable": self.is_self_replicable,
        }


def classify_set(net: ReactionNetwork, T: Iterable[int]) -> SetClassification:
    T = _nonempty(net, T)
    sv = siphon_violation(net, T)
    cv = closed_violation(net, T)
    law = positive_conservation_law(net, T)
    gordan = positive_conservation_refutation(net, T) if law is None else None
    grow, no_grow = _growth(net, T, +1)
    drain, no_drain = _growth(net, T, -1)
    return SetClassification(
        species=T,
        is_siphon=sv is None,
        is_closed=cv is None,
        is_critical=law is None,
        is_drainable=drain is not None,
        is_self_replicable=grow is not None,
        siphon_violation=sv,
        closed_violation=cv,
        conservation_law=law,
        gordan=gordan,
        self_replication=grow,
        no_growth=no_grow,
        drain=drain,
        no_drain=no_drain,
    )


def verify_classification(net: ReactionNetwork, c: SetClassification) -> list[str]:
    """Re-check every certificate in ``c`` with direct arithmetic; return failures."""
    G = net.gamma
    T = c.species
    errors = []

    def fail(msg):
        errors.append(f"{sorted(T)}: {msg}")

    if c.is_siphon != (siphon_violation(net, T) is None):
        fail("siphon flag")
    if not c.is_siphon:
        k = c.siphon_violation
        r = net.reactions[k] if k is not None and 0 <= k < len(net.reactions) else None
        if r is None or not (r.product.support() & T) or (r.reactant.support() & T):
            fail("siphon violation witness")
    if c.is_closed != (closed_violation(net, T) is None):
        fail("closed flag")
    if c.is_critical:
        v = c.gordan
        if v is None or len(v) != G.shape[0] or min(G.vecmat(v)[i] for i in T) < 1:
            fail("criticality certificate")
    else:
        w = c.conservation_law
        if w is None or not w.positive or not w.support() <= T or any(G.matvec(w.weights)):
            fail("conservation law witness")
    for flag, cert, block, sign, name in (
        (c.is_self_replicable, c.self_replication, c.no_growth, 1, "self-replication"),
        (c.is_drainable, c.drain, c.no_drain, -1, "drain"),
    ):
        if flag:
            if cert is None or any(a < 0 for a in cert) or min(sign * G.vecmat(cert)[i] for i in T) < 1:
                fail(f"{name} certificate")
        else:
            ok = (
                block is not None
                and all(u >= 0 for u in block)
                and any(block)
                and {i for i, u in enumerate(block) if u} <= T
                and all(sign * d <= 0 for d in G.matvec(block))
            )
            if not ok:
                fail(f"{name} obstruction")
    return errors
