"""Reaction networks over exact rational complexes, and the ``.crn`` format.

Grammar, one reaction per line::

    # comment
    species: A B C            (optional; pins the leading species order)
    0.3 X + 2.14 Y -> 1.1 Z
    X <-> 2Y                  (expands to X -> 2Y and 2Y -> X)
    0 -> A                    (0 is the empty complex)

Coefficients are integers, decimals or ``p/q``; all are kept exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import networkx as nx

from .feasibility import GE, Farkas, FeasibilitySystem, solve_feasibility
from .rational import RationalMatrix, Vector, fmt, kernel_basis, parse_rational

SpeciesSet = frozenset  # frozenset[int] of species ids

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_COEF = re.compile(r"\d+/\d+|\d+\.\d*|\.\d+|\d+")


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Species:
    id: int
    name: str


class Complex(Mapping[int, Fraction]):
    """Non-negative rational combination of species, keyed by species id."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[int, object] | Iterable[tuple[int, object]] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        c: dict[int, Fraction] = {}
        for k, v in items:
            v = Fraction(v)
            if v < 0:
                raise ValueError(f"negative coefficient {fmt(v)} for species {k}")
            if v:
                c[k] = c.get(k, Fraction(0)) + v
        self._c = dict(sorted(c.items()))
        self._hash = hash(frozenset(self._c.items()))

    @classmethod
    def from_vector(cls, v: Sequence) -> "Complex":
        return cls(enumerate(v))

    def __getitem__(self, k):
        return self._c[k]

    def get(self, k, default=Fraction(0)):
        return self._c.get(k, default)

    def __iter__(self) -> Iterator[int]:
        return iter(self._c)

    def __len__(self):
        return len(self._c)

    def __eq__(self, other):
        if isinstance(other, Complex):
            return self._c == other._c
        return NotImplemented

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Complex({ {k: fmt(v) for k, v in self._c.items()} })"

    def support(self) -> frozenset[int]:
        return frozenset(self._c)

    def vector(self, n: int) -> Vector:
        return tuple(self._c.get(i, Fraction(0)) for i in range(n))

    def __add__(self, other: "Complex") -> "Complex":
        return Complex(list(self._c.items()) + list(other._c.items()))

    def __sub__(self, other: "Complex") -> "Complex":
        """Difference; raises ``ValueError`` if a coefficient would go negative."""
        keys = set(self._c) | set(other._c)
        return Complex((k, self.get(k) - other.get(k)) for k in keys)

    def scale(self, k) -> "Complex":
        return Complex((i, v * k) for i, v in self._c.items())

    def __le__(self, other: "Complex") -> bool:
        return all(v <= other.get(k) for k, v in self._c.items())

    def meet(self, other: "Complex") -> "Complex":
        """Componentwise minimum."""
        return Complex((k, min(v, other.get(k))) for k, v in self._c.items())

    def is_integer(self) -> bool:
        return all(v.denominator == 1 for v in self._c.values())


@dataclass(frozen=True)
class Reaction:
    reactant: Complex
    product: Complex

    def reversed(self) -> "Reaction":
        return Reaction(self.product, self.reactant)


@dataclass(frozen=True)
class ConservationLaw:
    weights: Vector

    @property
    def positive(self) -> bool:
        return all(w >= 0 for w in self.weights) and any(self.weights)

    def support(self) -> frozenset[int]:
        return frozenset(i for i, w in enumerate(self.weights) if w)


@dataclass(frozen=True)
class ConsistencyResult:
    """``v >= 1`` with ``v Gamma = 0``, or a species weighting ``u`` refuting it.

    The refutation satisfies ``Gamma u >= 0`` with ``Gamma u != 0``: no
    reaction lowers ``u . x`` and some raise it, so no positive combination
    of reaction vectors can vanish.
    """

    consistent: bool
    vector: Vector | None = None
    refutation: Vector | None = None

    def __bool__(self):
        return self.consistent


@dataclass(frozen=True)
class ReactionNetwork:
    species: tuple[Species, ...]
    reactions: tuple[Reaction, ...]

    def __post_init__(self):
        names = [s.name for s in self.species]
        if len(set(names)) != len(names):
            raise ValueError("duplicate species names")
        if [s.id for s in self.species] != list(range(len(self.species))):
            raise ValueError("species ids must be contiguous from 0")
        n = len(self.species)
        seen = set()
        for r in self.reactions:
            if r.reactant == r.product:
                raise ValueError("self-loop reaction")
            if r in seen:
                raise ValueError("duplicate reaction")
            if any(k >= n for k in r.reactant.support() | r.product.support()):
                raise ValueError("reaction mentions an undeclared species")
            seen.add(r)

    @classmethod
    def build(cls, names: Sequence[str], reactions: Iterable[tuple[Mapping[str, object], Mapping[str, object]]]):
        """Build from species names and ``({name: coef}, {name: coef})`` pairs."""
        idx = {name: i for i, name in enumerate(names)}
        rs = tuple(
            Reaction(Complex((idx[k], v) for k, v in y.items()), Complex((idx[k], v) for k, v in yp.items()))
            for y, yp in reactions
        )
        return cls(tuple(Species(i, n) for i, n in enumerate(names)), rs)

    @property
    def n_species(self) -> int:
        return len(self.species)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.species)

    def index(self, name: str) -> int:
        for s in self.species:
            if s.name == name:
                return s.id
        raise KeyError(f"unknown species {name!r}")

    def species_set(self, names: Iterable[str] | str) -> frozenset[int]:
        if isinstance(names, str):
            names = [x for x in re.split(r"[,\s]+", names) if x]
        return frozenset(self.index(n) for n in names)

    def set_names(self, T: Iterable[int]) -> list[str]:
        return [self.species[i].name for i in sorted(T)]

    def check_subset(self, T: Iterable[int]) -> frozenset[int]:
        T = frozenset(T)
        if any(not (0 <= i < self.n_species) for i in T):
            raise ValueError(f"species set {sorted(T)} is not a subset of the network's species")
        return T

    def complex_from_text(self, text: str) -> Complex:
        return Complex((self.index(k), v) for k, v in _parse_side(text, 1, 1).items())

    def render_complex(self, y: Complex) -> str:
        if not y:
            return "0"
        parts = []
        for k, v in y.items():
            name = self.species[k].name
            parts.append(name if v == 1 else f"{fmt(v)} {name}")
        return " + ".join(parts)

    def render_reaction(self, r: Reaction) -> str:
        return f"{self.render_complex(r.reactant)} -> {self.render_complex(r.product)}"

    def to_text(self) -> str:
        lines = ["species: " + " ".join(self.names)]
        lines += [self.render_reaction(r) for r in self.reactions]
        return "\n".join(lines) + "\n"

    @cached_property
    def gamma(self) -> RationalMatrix:
        return stoichiometric_matrix(self)

    def is_chemical(self) -> bool:
        return all(r.reactant.is_integer() and r.product.is_integer() for r in self.reactions)


def _parse_side(text: str, lineno: int, col0: int) -> dict[str, Fraction]:
    stripped = text.strip()
    if stripped == "0":
        return {}
    if not stripped:
        raise ParseError("empty side (write 0 for the empty complex)", lineno, col0)
    out: dict[str, Fraction] = {}
    offset = 0
    for term in text.split("+"):
        col = col0 + offset + (len(term) - len(term.lstrip()))
        offset += len(term) + 1
        t = term.strip()
        if not t:
            raise ParseError("empty term", lineno, col)
        if t.startswith("-"):
            raise ParseError("negative coefficient", lineno, col)
        m = _COEF.match(t)
        coef = Fraction(1)
        rest = t
        if m:
            coef = parse_rational(m.group(0))
            rest = t[m.end():].strip()
            if rest.startswith("-"):
                raise ParseError("negative coefficient", lineno, col)
        if not _NAME.fullmatch(rest or ""):
            raise ParseError(f"bad term {t!r}", lineno, col)
        if coef == 0:
            raise ParseError("zero coefficient", lineno, col)
        out[rest] = out.get(rest, Fraction(0)) + coef
    return out


def parse_network(text: str) -> ReactionNetwork:
    """Parse a ``.crn`` document; species are ordered by first appearance."""
    order: list[str] = []
    raw: list[tuple[dict, dict, int]] = []

    def see(names):
        for n in names:
            if n not in order:
                order.append(n)

    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        head = body.strip()
        if head.startswith("species:"):
            if raw:
                raise ParseError("species header must precede reactions", lineno, 1)
            names = head[len("species:"):].split()
            for n in names:
                if not _NAME.fullmatch(n):
                    raise ParseError(f"bad species name {n!r}", lineno, body.index(n) + 1)
                if n in order:
                    raise ParseError(f"species {n!r} declared twice", lineno, body.index(n) + 1)
            see(names)
            continue
        if "<->" in body:
            arrow, reversible = "<->", True
        elif "->" in body:
            arrow, reversible = "->", False
        else:
            raise ParseError("expected '->' or '<->'", lineno, 1)
        if body.count("->") != 1:
            raise ParseError("more than one arrow", lineno, body.index(arrow) + 1)
        left, right = body.split(arrow)
        y = _parse_side(left, lineno, 1)
        yp = _parse_side(right, lineno, len(left) + len(arrow) + 1)
        see(y)
        see(yp)
        raw.append((y, yp, lineno))
        if reversible:
            raw.append((yp, y, lineno))

    if not order:
        raise ParseError("empty network", 1, 1)
    idx = {n: i for i, n in enumerate(order)}
    reactions: list[Reaction] = []
    seen: set[Reaction] = set()
    for y, yp, lineno in raw:
        r = Reaction(Complex((idx[k], v) for k, v in y.items()), Complex((idx[k], v) for k, v in yp.items()))
        if r.reactant == r.product:
            raise ParseError("self-loop reaction (reactant equals product)", lineno, 1)
        if r in seen:
            raise ParseError("duplicate reaction", lineno, 1)
        seen.add(r)
        reactions.append(r)
    return ReactionNetwork(tuple(Species(i, n) for i, n in enumerate(order)), tuple(reactions))


def stoichiometric_matrix(net: ReactionNetwork) -> RationalMatrix:
    """Rows are reaction vectors ``product - reactant`` in reaction order."""
    n = net.n_species
    rows = []
    for r in net.reactions:
        rows.append([r.product.get(i) - r.reactant.get(i) for i in range(n)])
    return RationalMatrix(rows, n)


def conservation_laws(net: ReactionNetwork) -> list[ConservationLaw]:
    return [ConservationLaw(w) for w in kernel_basis(net.gamma)]


def positive_conservation_law_system(net: ReactionNetwork, bound: frozenset[int]) -> FeasibilitySystem:
    """``w >= 0`` over ``bound``, ``sum w = 1``, ``Gamma_bound w = 0``."""
    cols = sorted(bound)
    G = net.gamma
    sys = FeasibilitySystem.nonnegative(len(cols))
    sys.add_eq([1] * len(cols), 1)
    for row in G.rows:
        sys.add_eq([row[j] for j in cols], 0)
    return sys


def positive_conservation_law(net: ReactionNetwork, bound: Iterable[int]) -> ConservationLaw | None:
    """A normalised positive conservation law supported inside ``bound``, if any."""
    bound = net.check_subset(bound)
    if not bound:
        raise ValueError("support bound must be non-empty")
    res = solve_feasibility(positive_conservation_law_system(net, bound))
    if not res:
        return None
    w = [Fraction(0)] * net.n_species
    for j, x in zip(sorted(bound), res.point):
        w[j] = x
    return ConservationLaw(tuple(w))


def positive_conservation_refutation(net: ReactionNetwork, bound: Iterable[int]) -> Vector | None:
    """Gordan certificate ``v`` with ``(v Gamma)_i >= 1`` for all ``i`` in ``bound``.

    Exists exactly when no positive conservation law is supported in ``bound``.
    """
    bound = net.check_subset(bound)
    sys = positive_conservation_law_system(net, bound)
    res = solve_feasibility(sys)
    if res:
        return None
    nu, *mu = res.farkas.eq
    # sum_r mu_r Gamma_r,i + nu <= 0 on bound with nu > 0, so v = -mu / nu works
    return tuple(-m / nu for m in mu)


def conservative_law(net: ReactionNetwork) -> ConservationLaw | None:
    """A conservation law with every weight at least 1, if the network is conservative."""
    n = net.n_species
    sys = FeasibilitySystem.nonnegative(n)
    for i in range(n):
        sys.add_ineq([int(i == j) for j in range(n)], GE, 1)
    for row in net.gamma.rows:
        sys.add_eq(row, 0)
    res = solve_feasibility(sys)
    return ConservationLaw(res.point) if res else None


def complexes(net: ReactionNetwork) -> list[Complex]:
    out: dict[Complex, None] = {}
    for r in net.reactions:
        out.setdefault(r.reactant)
        out.setdefault(r.product)
    return list(out)


def reaction_graph(net: ReactionNetwork) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(complexes(net))
    g.add_edges_from((r.reactant, r.product) for r in net.reactions)
    return g


def is_reversible(net: ReactionNetwork) -> bool:
    rs = set(net.reactions)
    return all(r.reversed() in rs for r in rs)


def is_weakly_reversible(net: ReactionNetwork) -> bool:
    comp = {}
    for k, scc in enumerate(nx.strongly_connected_components(reaction_graph(net))):
        for c in scc:
            comp[c] = k
    return all(comp[r.reactant] == comp[r.product] for r in net.reactions)


def is_consistent(net: ReactionNetwork) -> ConsistencyResult:
    """Look for ``v >= 1`` (one entry per reaction) with ``v Gamma = 0``."""
    G = net.gamma
    m, n = G.shape
    sys = FeasibilitySystem.nonnegative(m)
    for j in range(n):
        sys.add_eq(G.column(j), 0)
    for r in range(m):
        sys.add_ineq([int(r == k) for k in range(m)], GE, 1)
    res = solve_feasibility(sys)
    if res:
        return ConsistencyResult(True, vector=res.point)
    return ConsistencyResult(False, refutation=tuple(-mu for mu in res.farkas.eq))


def check_consistency(net: ReactionNetwork, result: ConsistencyResult) -> bool:
    G = net.gamma
    if result.consistent:
        v = result.vector
        return len(v) == G.shape[0] and min(v, default=1) >= 1 and not any(G.vecmat(v))
    u = result.refutation
    d = G.matvec(u)
    return all(x >= 0 for x in d) and any(d)


def opposite_network(net: ReactionNetwork) -> ReactionNetwork:
    return ReactionNetwork(net.species, tuple(r.reversed() for r in net.reactions))
