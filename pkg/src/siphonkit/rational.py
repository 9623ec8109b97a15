"""Dense exact-rational matrices and fraction-free elimination."""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple[Fraction, ...]

_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+|\d+/\d+)$")


def parse_rational(token: str) -> Fraction:
    """Parse ``int``, ``decimal`` or ``p/q`` exactly (``0.3`` -> ``3/10``)."""
    token = token.strip()
    if not _NUMBER.match(token):
        raise ValueError(f"not a rational literal: {token!r}")
    if "/" in token:
        num, den = token.split("/")
        if int(den) == 0:
            raise ValueError(f"zero denominator in {token!r}")
        return Fraction(int(num), int(den))
    return Fraction(token)


def fmt(q: Fraction | int) -> str:
    """Canonical rendering: ``p/q``, or an integer when ``q == 1``."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def as_vector(values: Iterable) -> Vector:
    return tuple(Fraction(v) for v in values)


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def primitive(v: Sequence[Fraction]) -> Vector:
    """Scale ``v`` to the integer vector with gcd 1 pointing the same way."""
    lcm = 1
    for x in v:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in v]
    g = math.gcd(*ints) if ints else 0
    if g == 0:
        return tuple(Fraction(0) for _ in v)
    return tuple(Fraction(i // g) for i in ints)


def _integer_row(row: Sequence[Fraction]) -> list[int]:
    lcm = 1
    for x in row:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    return [int(x * lcm) for x in row]


def _reduce(row: list[int]) -> list[int]:
    g = math.gcd(*row)
    if g > 1:
        return [x // g for x in row]
    return row


class RationalMatrix:
    """Immutable dense matrix of ``Fraction`` entries."""

    __slots__ = ("rows", "shape")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        self.rows: tuple[Vector, ...] = tuple(as_vector(r) for r in rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != ncols for r in self.rows):
            raise ValueError("ragged matrix")
        self.shape = (len(self.rows), ncols)

    @classmethod
    def from_text(cls, text: str) -> "RationalMatrix":
        """One row per line, whitespace separated; ``#`` starts a comment."""
        rows = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                rows.append([parse_rational(tok) for tok in line.split()])
        if not rows:
            raise ValueError("empty matrix")
        return cls(rows)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        body = "; ".join(" ".join(fmt(x) for x in r) for r in self.rows)
        return f"RationalMatrix([{body}])"

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @property
    def is_square(self) -> bool:
        return self.shape[0] == self.shape[1]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    @property
    def T(self) -> "RationalMatrix":
        m, n = self.shape
        return RationalMatrix([self.column(j) for j in range(n)], m)

    def select_columns(self, cols: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix([[r[j] for j in cols] for r in self.rows], len(cols))

    def vecmat(self, a: Sequence) -> Vector:
        """Row combination ``a @ M``."""
        m, n = self.shape
        out = [Fraction(0)] * n
        for ai, row in zip(a, self.rows):
            if ai:
                for j in range(n):
                    out[j] += ai * row[j]
        return tuple(out)

    def matvec(self, v: Sequence) -> Vector:
        return tuple(dot(row, v) for row in self.rows)

    def matmul(self, other: "RationalMatrix") -> "RationalMatrix":
        return RationalMatrix([other.vecmat(r) for r in self.rows], other.shape[1])

    def neg(self) -> "RationalMatrix":
        return RationalMatrix([[-x for x in r] for r in self.rows], self.shape[1])

    def rref(self) -> tuple[list[list[int]], list[int]]:
        """Fraction-free reduced echelon form.

        Returns integer rows (each scaled to gcd 1, pivot entry positive) and
        the pivot column of each row. Zero rows are dropped.
        """
        rows = [_reduce(_integer_row(r)) for r in self.rows if any(r)]
        ncols = self.shape[1]
        pivots: list[int] = []
        top = 0
        for col in range(ncols):
            pr = next((i for i in range(top, len(rows)) if rows[i][col] != 0), None)
            if pr is None:
                continue
            rows[top], rows[pr] = rows[pr], rows[top]
            piv = rows[top]
            if piv[col] < 0:
                piv = rows[top] = [-x for x in piv]
            p = piv[col]
            for i in range(len(rows)):
                if i != top and rows[i][col] != 0:
                    f = rows[i][col]
                    rows[i] = _reduce([p * a - f * b for a, b in zip(rows[i], piv)])
            pivots.append(col)
            top += 1
            if top == len(rows):
                break
        return rows[:top], pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def inverse(self) -> "RationalMatrix":
        if not self.is_square:
            raise ValueError("inverse of a non-square matrix")
        n = self.shape[0]
        aug = RationalMatrix([list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(self.rows)])
        rows, pivots = aug.rref()
        if pivots[:n] != list(range(n)) or len(rows) < n:
            raise ZeroDivisionError("matrix is singular")
        return RationalMatrix([[Fraction(x, r[i]) for x in r[n:]] for i, r in enumerate(rows)], n)


def kernel_basis(M: RationalMatrix) -> list[Vector]:
    """Basis of ``{v : M v = 0}``, one primitive integer vector per free column.

    The free coordinate of each basis vector is positive; order follows the
    free columns left to right.
    """
    m, n = M.shape
    rows, pivots = M.rref()
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(rows, pivots):
            v[pc] = Fraction(-row[f], row[pc])
        basis.append(primitive(v))
    return basis
