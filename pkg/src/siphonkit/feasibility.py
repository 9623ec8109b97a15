"""Exact linear feasibility by phase-1 simplex with Bland's rule.

Every answer carries a certificate: a feasible point, or Farkas multipliers
that anyone can check with :func:`check_farkas` without trusting the solver.
Strict inequalities are not accepted; conic callers encode ``> 0`` as
``>= 1`` after scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .rational import Vector, as_vector, dot

GE, LE = ">=", "<="


@dataclass
class FeasibilitySystem:
    """Equalities ``row . x == rhs`` and inequalities ``row . x (>=|<=) rhs``.

    Variables listed in ``nonneg`` are constrained to ``x_j >= 0``; the rest
    are free.
    """

    n_vars: int
    equalities: list[tuple[Vector, Fraction]] = field(default_factory=list)
    inequalities: list[tuple[Vector, str, Fraction]] = field(default_factory=list)
    nonneg: frozenset[int] = frozenset()

    @classmethod
    def nonnegative(cls, n_vars: int) -> "FeasibilitySystem":
        return cls(n_vars, nonneg=frozenset(range(n_vars)))

    def add_eq(self, row: Sequence, rhs=0) -> None:
        row = as_vector(row)
        if len(row) != self.n_vars:
            raise ValueError("row length differs from variable count")
        self.equalities.append((row, Fraction(rhs)))

    def add_ineq(self, row: Sequence, rel: str, rhs=0) -> None:
        row = as_vector(row)
        if len(row) != self.n_vars:
            raise ValueError("row length differs from variable count")
        if rel not in (GE, LE):
            raise ValueError(f"unsupported relation {rel!r}")
        self.inequalities.append((row, rel, Fraction(rhs)))

    def is_satisfied_by(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.n_vars or any(x[j] < 0 for j in self.nonneg):
            return False
        if any(dot(r, x) != b for r, b in self.equalities):
            return False
        for r, rel, b in self.inequalities:
            lhs = dot(r, x)
            if (rel == GE and lhs < b) or (rel == LE and lhs > b):
                return False
        return True


@dataclass(frozen=True)
class Farkas:
    """Multipliers for the equalities and inequalities of an infeasible system."""

    eq: Vector
    ineq: Vector


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    point: Vector | None = None
    farkas: Farkas | None = None

    def __bool__(self) -> bool:
        return self.feasible


def check_farkas(sys: FeasibilitySystem, cert: Farkas) -> bool:
    """Independent infeasibility check.

    With ``g = sum(lam_i * row_i)`` we need ``g_j <= 0`` on non-negative
    variables, ``g_j == 0`` on free ones, ``lam >= 0`` on ``>=`` rows,
    ``lam <= 0`` on ``<=`` rows and ``lam . rhs > 0``. Any feasible ``x``
    would then give ``0 >= g . x >= lam . rhs > 0``.
    """
    if len(cert.eq) != len(sys.equalities) or len(cert.ineq) != len(sys.inequalities):
        return False
    g = [Fraction(0)] * sys.n_vars
    total = Fraction(0)
    for lam, (row, rhs) in zip(cert.eq, sys.equalities):
        total += lam * rhs
        for j, a in enumerate(row):
            g[j] += lam * a
    for lam, (row, rel, rhs) in zip(cert.ineq, sys.inequalities):
        if (rel == GE and lam < 0) or (rel == LE and lam > 0):
            return False
        total += lam * rhs
        for j, a in enumerate(row):
            g[j] += lam * a
    for j in range(sys.n_vars):
        if j in sys.nonneg:
            if g[j] > 0:
                return False
        elif g[j] != 0:
            return False
    return total > 0


def _lcm_den(values) -> int:
    lcm = 1
    for x in values:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    return lcm


def solve_feasibility(sys: FeasibilitySystem) -> FeasibilityResult:
    """Find a rational point of ``sys`` or a Farkas certificate of infeasibility.

    Standard form ``A z = b, z >= 0, b >= 0`` is built by splitting free
    variables, adding one slack per inequality and one artificial per row.
    The tableau is kept in integers (each row scaled to gcd 1); entering and
    leaving variables follow Bland's rule, so pivoting terminates.
    """
    n = sys.n_vars
    cons = [(row, None, rhs) for row, rhs in sys.equalities] + list(sys.inequalities)
    m = len(cons)
    if m == 0:
        return FeasibilityResult(True, point=tuple(Fraction(0) for _ in range(n)))

    # column layout: structural columns, then slacks, then artificials
    struct: list[tuple[int, int]] = []  # (original var, sign)
    for j in range(n):
        struct.append((j, 1))
        if j not in sys.nonneg:
            struct.append((j, -1))
    n_struct = len(struct)
    n_slack = len(sys.inequalities)
    art0 = n_struct + n_slack
    width = art0 + m  # rhs stored at index ``width``

    tab: list[list[int]] = []
    row_scale: list[Fraction] = []  # standard row i = row_scale[i] * original row i
    slack_idx = 0
    for i, (row, rel, rhs) in enumerate(cons):
        frow = [row[j] * s for j, s in struct]
        slack = [Fraction(0)] * n_slack
        if rel is not None:
            slack[slack_idx] = Fraction(-1 if rel == GE else 1)
            slack_idx += 1
        full = frow + slack + [rhs]
        sign = -1 if rhs < 0 else 1
        lcm = _lcm_den(full)
        scale = sign * lcm
        ints = [int(x * scale) for x in full]
        row_scale.append(Fraction(scale))
        art = [0] * m
        art[i] = 1
        tab.append(ints[:-1] + art + [ints[-1]])
    basis = [art0 + i for i in range(m)]

    # phase-1 objective: minimise the sum of artificials; priced-out costs
    obj = [0] * (width + 1)
    for j in range(art0):
        obj[j] = -sum(r[j] for r in tab)
    obj[width] = -sum(r[width] for r in tab)

    while True:
        enter = next((j for j in range(width) if obj[j] < 0 and j not in basis), None)
        if enter is None:
            break
        best = None
        for i, r in enumerate(tab):
            if r[enter] > 0:
                ratio = Fraction(r[width], r[enter])
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:  # unbounded direction cannot occur in phase 1
            raise RuntimeError("phase-1 simplex unbounded")
        p_i = best[1]
        prow = tab[p_i]
        p = prow[enter]
        for i in range(m):
            if i != p_i and tab[i][enter] != 0:
                f = tab[i][enter]
                new = [p * a - f * b for a, b in zip(tab[i], prow)]
                g = math.gcd(*new)
                tab[i] = [x // g for x in new] if g > 1 else new
        f = obj[enter]
        new = [p * a - f * b for a, b in zip(obj, prow)]
        g = math.gcd(*new)
        obj = [x // g for x in new] if g > 1 else new
        basis[p_i] = enter

    values = [Fraction(0)] * width
    for i, b in enumerate(basis):
        values[b] = Fraction(tab[i][width], tab[i][b])
    if all(values[art0 + i] == 0 for i in range(m)):
        x = [Fraction(0)] * n
        for k, (j, s) in enumerate(struct):
            x[j] += s * values[k]
        x = tuple(x)
        assert sys.is_satisfied_by(x), "simplex returned an infeasible point"
        return FeasibilityResult(True, point=x)

    # dual of phase 1: y = c_B B^{-1}; the artificial block of row i holds B^{-1} row i
    y = [Fraction(0)] * m
    for i, b in enumerate(basis):
        if b >= art0:
            d = tab[i][b]
            for k in range(m):
                if tab[i][art0 + k]:
                    y[k] += Fraction(tab[i][art0 + k], d)
    lam = [y[i] * row_scale[i] for i in range(m)]
    ne = len(sys.equalities)
    cert = Farkas(eq=tuple(lam[:ne]), ineq=tuple(lam[ne:]))
    assert check_farkas(sys, cert), "simplex produced an invalid Farkas certificate"
    return FeasibilityResult(False, farkas=cert)
