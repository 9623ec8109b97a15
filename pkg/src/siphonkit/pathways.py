"""Dilutions, replayable pathway witnesses, bounded reachability and catalysis."""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .feasibility import Farkas, FeasibilitySystem, check_farkas, solve_feasibility
from .network import Complex, ReactionNetwork
from .rational import as_vector, fmt
from .siphons import is_siphon, largest_siphon_avoiding

DEFAULT_BOUND = 64


class PathwayError(ValueError):
    pass


@dataclass(frozen=True)
class Dilution:
    reaction_index: int
    padding: Complex


@dataclass(frozen=True)
class PathwayWitness:
    start: Complex
    steps: tuple[Dilution, ...] = ()

    def to_json(self, net: ReactionNetwork) -> dict:
        return {
            "start": _complex_json(net, self.start),
            "steps": [{"reaction": d.reaction_index, "padding": _complex_json(net, d.padding)} for d in self.steps],
        }

    @classmethod
    def from_json(cls, net: ReactionNetwork, data: dict) -> "PathwayWitness":
        steps = tuple(Dilution(int(s["reaction"]), _complex_from_json(net, s["padding"])) for s in data["steps"])
        return cls(_complex_from_json(net, data["start"]), steps)


def _complex_json(net: ReactionNetwork, y: Complex) -> dict[str, str]:
    return {net.species[k].name: fmt(v) for k, v in y.items()}


def _complex_from_json(net: ReactionNetwork, d: dict) -> Complex:
    return Complex((net.index(k), Fraction(v)) for k, v in d.items())


def replay(net: ReactionNetwork, w: PathwayWitness) -> Complex:
    """Apply every dilution; each must fit the current population exactly."""
    cur = w.start
    for n, step in enumerate(w.steps):
        if not 0 <= step.reaction_index < len(net.reactions):
            raise PathwayError(f"step {n}: no reaction {step.reaction_index}")
        r = net.reactions[step.reaction_index]
        if r.reactant + step.padding != cur:
            raise PathwayError(f"step {n}: reactant plus padding does not equal the current population")
        cur = r.product + step.padding
    return cur


def populations(net: ReactionNetwork, w: PathwayWitness) -> list[Complex]:
    out = [w.start]
    for step in w.steps:
        out.append(net.reactions[step.reaction_index].product + step.padding)
    return out


def fire(net: ReactionNetwork, pop: Complex, k: int) -> Complex | None:
    """Fire reaction ``k`` on ``pop`` with minimal padding, or None if it does not fit."""
    r = net.reactions[k]
    if not r.reactant <= pop:
        return None
    return r.product + (pop - r.reactant)


def witness_from_coefficients(net: ReactionNetwork, a: Sequence) -> PathwayWitness:
    """Realise the combination ``a Gamma`` (``a >= 0``) as a concrete pathway.

    Denominators are cleared to integer counts ``n_r``; the start population
    is the sum of ``n_r`` copies of each reactant, so whatever has not fired
    yet always fits inside the current population.
    """
    a = as_vector(a)
    if len(a) != len(net.reactions) or any(x < 0 for x in a) or not any(a):
        raise ValueError("need a non-negative, non-zero coefficient per reaction")
    lcm = 1
    for x in a:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    counts = [int(x * lcm) for x in a]
    start = Complex()
    for n, r in zip(counts, net.reactions):
        start = start + r.reactant.scale(n)
    steps = []
    cur = start
    for k, n in enumerate(counts):
        r = net.reactions[k]
        for _ in range(n):
            pad = cur - r.reactant
            steps.append(Dilution(k, pad))
            cur = r.product + pad
    return PathwayWitness(start, tuple(steps))


class Reach(enum.Enum):
    REACHABLE = "Reachable"
    UNREACHABLE_BY_CONE = "UnreachableByCone"
    UNREACHABLE_BY_SIPHON = "UnreachableBySiphon"
    UNREACHABLE_BY_INTEGRALITY = "UnreachableByIntegrality"
    UNREACHABLE_EXHAUSTIVE = "UnreachableExhaustive"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ReachabilityVerdict:
    """Outcome of :func:`bounded_reach` with its evidence.

    ``witness`` for reachable, ``farkas`` (over :func:`cone_system`) for the
    cone test, ``siphon`` for siphon separation, ``explored`` for the size of
    a fully enumerated reachable set, ``bound`` for Unknown and exhaustive runs.
    """

    kind: Reach
    witness: PathwayWitness | None = None
    farkas: Farkas | None = None
    siphon: frozenset[int] | None = None
    explored: int | None = None
    bound: int | None = None

    @property
    def reachable(self) -> bool:
        return self.kind is Reach.REACHABLE

    @property
    def unreachable(self) -> bool:
        return self.kind not in (Reach.REACHABLE, Reach.UNKNOWN)


def cone_system(net: ReactionNetwork, displacement: Sequence) -> FeasibilitySystem:
    """``a >= 0`` with ``a Gamma = displacement``."""
    G = net.gamma
    sys = FeasibilitySystem.nonnegative(G.shape[0])
    for j in range(G.shape[1]):
        sys.add_eq(G.column(j), displacement[j])
    return sys


def _fractional_split(y: Complex) -> tuple[Complex, Complex]:
    whole = Complex((k, math.floor(v)) for k, v in y.items())
    return whole, y - whole


def bounded_reach(
    net: ReactionNetwork,
    source: Complex,
    target: Complex,
    bound: int = DEFAULT_BOUND,
    max_states: int = 200_000,
) -> ReachabilityVerdict:
    """Decide ``source ->* target`` up to ``bound`` firings, with sound refutations.

    Order of tests: identity, fractional parts (they never change in a
    chemical network), cone membership of ``target - source``, siphon
    separation, then breadth-first search over populations. A search that
    drains its frontier without hitting the bound has enumerated the whole
    reachable set and proves unreachability.
    """
    if bound <= 0:
        raise ValueError("bound must be positive")
    if not net.is_chemical():
        raise ValueError("bounded_reach needs a chemical (integer) network")
    src, src_frac = _fractional_split(source)
    tgt, tgt_frac = _fractional_split(target)
    if src_frac != tgt_frac:
        return ReachabilityVerdict(Reach.UNREACHABLE_BY_INTEGRALITY)
    if src == tgt:
        return ReachabilityVerdict(Reach.REACHABLE, witness=PathwayWitness(source))

    n = net.n_species
    disp = [tgt.get(i) - src.get(i) for i in range(n)]
    res = solve_feasibility(cone_system(net, disp))
    if not res:
        return ReachabilityVerdict(Reach.UNREACHABLE_BY_CONE, farkas=res.farkas)
    T = largest_siphon_avoiding(net, src.support())
    if T & tgt.support():
        return ReachabilityVerdict(Reach.UNREACHABLE_BY_SIPHON, siphon=T)

    parent: dict[Complex, tuple[Complex, int] | None] = {src: None}
    frontier = [src]
    truncated = False
    for depth in range(bound):
        nxt = []
        for pop in frontier:
            for k in range(len(net.reactions)):
                new = fire(net, pop, k)
                if new is None or new in parent:
                    continue
                parent[new] = (pop, k)
                if new == tgt:
                    return ReachabilityVerdict(Reach.REACHABLE, witness=_trace(net, parent, tgt, src_frac))
                nxt.append(new)
        if len(parent) > max_states:
            truncated = True
            break
        # lexicographic order keeps the search deterministic under any dict behaviour
        frontier = sorted(nxt, key=lambda y: y.vector(n))
        if not frontier:
            break
    else:
        truncated = bool(frontier)
    if truncated:
        return ReachabilityVerdict(Reach.UNKNOWN, bound=bound)
    return ReachabilityVerdict(Reach.UNREACHABLE_EXHAUSTIVE, explored=len(parent), bound=bound)


def _trace(net, parent, tgt: Complex, frac: Complex) -> PathwayWitness:
    steps = []
    cur = tgt
    while parent[cur] is not None:
        prev, k = parent[cur]
        steps.append(Dilution(k, prev - net.reactions[k].reactant + frac))
        cur = prev
    return PathwayWitness(cur + frac, tuple(reversed(steps)))


def verify_reachability(net: ReactionNetwork, source: Complex, target: Complex, v: ReachabilityVerdict) -> bool:
    """Check the evidence carried by a verdict without re-running the search."""
    if v.kind is Reach.REACHABLE:
        try:
            return v.witness.start == source and replay(net, v.witness) == target
        except PathwayError:
            return False
    if v.kind is Reach.UNREACHABLE_BY_CONE:
        disp = [target.get(i) - source.get(i) for i in range(net.n_species)]
        return v.farkas is not None and check_farkas(cone_system(net, disp), v.farkas)
    if v.kind is Reach.UNREACHABLE_BY_SIPHON:
        T = v.siphon
        return bool(T) and is_siphon(net, T) and not (T & source.support()) and bool(T & target.support())
    if v.kind is Reach.UNREACHABLE_BY_INTEGRALITY:
        return _fractional_split(source)[1] != _fractional_split(target)[1]
    # exhaustive enumeration is replayed by running it again
    if v.kind is Reach.UNREACHABLE_EXHAUSTIVE:
        again = bounded_reach(net, source, target, bound=v.bound or DEFAULT_BOUND)
        return again.unreachable
    return True


# -- catalysis ---------------------------------------------------------------


class Catalysis(enum.Enum):
    CATALYTIC = "catalytic"
    STRICTLY_CATALYTIC = "strictly_catalytic"


@dataclass(frozen=True)
class CatalysisFinding:
    """A set ``T = supp(min(y, y'))`` with evidence that the bare conversion fails.

    ``strict_reason`` is ``"siphon"`` or ``"disabled"`` when the failure holds
    for every multiple ``k``; otherwise ``counter_k`` is a multiple for which
    the bare conversion succeeds, or None if none was found up to ``k_tested``.
    """

    species: frozenset[int]
    kind: Catalysis
    pathway: PathwayWitness
    bare_source: Complex
    bare_target: Complex
    unreachable: ReachabilityVerdict
    strict_reason: str | None = None
    siphon: frozenset[int] | None = None
    k_tested: int = 0
    counter_k: int | None = None
    counter_witness: PathwayWitness | None = None
    notes: list[str] = field(default_factory=list)


def _bare_pair(y: Complex, yp: Complex) -> tuple[Complex, Complex, Complex]:
    m = y.meet(yp)
    return m, y - m, yp - m


def strict_separation(net: ReactionNetwork, a: Complex, b: Complex) -> tuple[str, frozenset[int] | None] | None:
    """Support-based proof that ``k a ->* k b`` fails for every ``k > 0``.

    Either a siphon avoids ``supp(a)`` but meets ``supp(b)``, or no reaction
    can fire on any population with support ``supp(a)`` while ``a != b``.
    Both only look at supports, which scaling by ``k`` leaves unchanged.
    """
    if a == b:
        return None
    T = largest_siphon_avoiding(net, a.support())
    if T & b.support():
        return "siphon", T
    if not any(r.reactant.support() <= a.support() for r in net.reactions):
        return "disabled", None
    return None


def check_strict_separation(net: ReactionNetwork, a: Complex, b: Complex, reason: str, siphon) -> bool:
    if a == b:
        return False
    if reason == "siphon":
        return bool(siphon) and is_siphon(net, siphon) and not (siphon & a.support()) and bool(siphon & b.support())
    if reason == "disabled":
        return not any(r.reactant.support() <= a.support() for r in net.reactions)
    return False


def _candidate_pathways(net: ReactionNetwork, depth: int, limit: int) -> Iterable[PathwayWitness]:
    """Single reactions first, then short pathways from each reactant complex."""
    for k, r in enumerate(net.reactions):
        yield PathwayWitness(r.reactant, (Dilution(k, Complex()),))
    produced = 0
    for r0 in net.reactions:
        start = r0.reactant
        queue = deque([(start, ())])
        seen = {start}
        while queue and produced < limit:
            pop, steps = queue.popleft()
            if len(steps) >= depth:
                continue
            for k in range(len(net.reactions)):
                new = fire(net, pop, k)
                if new is None or new in seen:
                    continue
                seen.add(new)
                path = steps + (Dilution(k, pop - net.reactions[k].reactant),)
                if len(path) > 1:
                    produced += 1
                    yield PathwayWitness(start, path)
                queue.append((new, path))


def find_catalytic_sets(
    net: ReactionNetwork, search_bound: int = DEFAULT_BOUND, k_max: int = 8, depth: int = 3, limit: int = 200
) -> list[CatalysisFinding]:
    """Search short pathways ``y ->* y'`` whose bare conversion is provably blocked.

    Catalytic needs a refutation of ``y - m ->* y' - m`` (``m = min(y, y')``);
    strictly catalytic needs a support-based refutation valid for all
    multiples. Multiples ``k = 2..k_max`` are tried to expose non-strict sets.
    One finding is kept per species set, preferring strict evidence.
    """
    if not net.is_chemical():
        raise ValueError("catalysis search needs a chemical network")
    best: dict[frozenset[int], CatalysisFinding] = {}
    for w in _candidate_pathways(net, depth, limit):
        y = w.start
        yp = replay(net, w)
        m, a, b = _bare_pair(y, yp)
        T = m.support()
        if not T or (T in best and best[T].kind is Catalysis.STRICTLY_CATALYTIC):
            continue
        strict = strict_separation(net, a, b)
        if strict is not None:
            reason, siphon = strict
            v = bounded_reach(net, a, b, search_bound)
            best[T] = CatalysisFinding(
                T, Catalysis.STRICTLY_CATALYTIC, w, a, b, v, strict_reason=reason, siphon=siphon
            )
            continue
        if T in best:
            continue
        v = bounded_reach(net, a, b, search_bound)
        if not v.unreachable:
            continue
        finding = CatalysisFinding(T, Catalysis.CATALYTIC, w, a, b, v, k_tested=1)
        for k in range(2, k_max + 1):
            vk = bounded_reach(net, a.scale(k), b.scale(k), search_bound)
            finding = CatalysisFinding(
                T, Catalysis.CATALYTIC, w, a, b, v, k_tested=k,
                counter_k=k if vk.reachable else None,
                counter_witness=vk.witness if vk.reachable else None,
            )
            if vk.reachable:
                break
        if finding.counter_k is None:
            finding.notes.append(f"catalytic; strictness not certified (multiples up to {finding.k_tested} blocked)")
        best[T] = finding
    return sorted(best.values(), key=lambda f: (len(f.species), sorted(f.species)))


def verify_catalysis(net: ReactionNetwork, f: CatalysisFinding) -> bool:
    try:
        end = replay(net, f.pathway)
    except PathwayError:
        return False
    m, a, b = _bare_pair(f.pathway.start, end)
    if m.support() != f.species or a != f.bare_source or b != f.bare_target:
        return False
    if f.kind is Catalysis.STRICTLY_CATALYTIC:
        return check_strict_separation(net, a, b, f.strict_reason, f.siphon)
    if not (f.unreachable.unreachable and verify_reachability(net, a, b, f.unreachable)):
        return False
    if f.counter_k is not None:
        cw = f.counter_witness
        return cw is not None and cw.start == a.scale(f.counter_k) and replay(net, cw) == b.scale(f.counter_k)
    return True


def strictly_catalytic_from_self_replicable_siphon(net: ReactionNetwork, T: Iterable[int], cert: Sequence):
    """Turn a self-replicable siphon into strict-catalysis evidence.

    The pathway from ``cert`` raises every ``T`` species, so the bare source
    has no ``T`` species and the bare target has all of them; ``T`` itself
    separates them for every multiple. The pathway is diluted by one unit of
    each ``T`` species, so the returned set ``supp(min(y, y'))`` contains ``T``.
    """
    T = net.check_subset(T)
    G = net.gamma
    cert = as_vector(cert)
    if not T or not is_siphon(net, T):
        raise ValueError("precondition: T must be a non-empty siphon")
    if len(cert) != G.shape[0] or any(x < 0 for x in cert) or any(G.vecmat(cert)[i] <= 0 for i in T):
        raise ValueError("precondition: cert must make every T coordinate grow")
    base = witness_from_coefficients(net, cert)
    pad = Complex((i, 1) for i in T)
    w = PathwayWitness(base.start + pad, tuple(Dilution(d.reaction_index, d.padding + pad) for d in base.steps))
    yp = replay(net, w)
    m, a, b = _bare_pair(w.start, yp)
    if T & a.support() or not T <= b.support():
        raise AssertionError("self-replication pathway does not separate T")
    return m.support(), CatalysisFinding(
        m.support(), Catalysis.STRICTLY_CATALYTIC, w, a, b,
        ReachabilityVerdict(Reach.UNREACHABLE_BY_SIPHON, siphon=T),
        strict_reason="siphon", siphon=T,
    )
