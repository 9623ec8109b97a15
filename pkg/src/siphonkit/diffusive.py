"""Diffusive matrices and the certified convex rank-nullity trichotomy.

A square matrix is diffusive when its diagonal is strictly negative and its
off-diagonal part non-negative, strongly diffusive when the off-diagonal part
is strictly positive. For a strongly diffusive ``A`` exactly one of these
holds, each with a certificate:

* ``KERNEL_NONNEG``: ``v >= 0, v != 0, A v = 0``
* ``POSITIVE_COMBINATION``: ``a >= 0`` with ``a A >= 1``
* ``NEGATIVE_ORTHANT``: ``C >= 0`` with ``C A = -I``
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .feasibility import GE, LE, FeasibilitySystem, solve_feasibility
from .rational import RationalMatrix, Vector, as_vector, kernel_basis


class NotStronglyDiffusive(ValueError):
    pass


class NotDiffusive(ValueError):
    pass


class TheoremViolation(AssertionError):
    """A proven structural statement failed on concrete input."""


class Verdict(enum.Enum):
    KERNEL_NONNEG = "KernelNonneg"
    POSITIVE_COMBINATION = "PositiveCombination"
    NEGATIVE_ORTHANT = "NegativeOrthant"
    NONE_OF_THREE = "NoneOfThree"


@dataclass(frozen=True)
class TrichotomyVerdict:
    kind: Verdict
    certificate: Vector | RationalMatrix | None = None

    def check(self, A: RationalMatrix) -> bool:
        return verify_certificate(A, self)


def _require_square(A: RationalMatrix) -> None:
    if not A.is_square:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")


def validate_diffusive(A: RationalMatrix) -> bool:
    _require_square(A)
    n = A.shape[0]
    return all((A[i, j] < 0) if i == j else (A[i, j] >= 0) for i in range(n) for j in range(n))


def validate_strongly_diffusive(A: RationalMatrix) -> bool:
    _require_square(A)
    n = A.shape[0]
    return all((A[i, j] < 0) if i == j else (A[i, j] > 0) for i in range(n) for j in range(n))


def verify_certificate(A: RationalMatrix, verdict: TrichotomyVerdict) -> bool:
    """Replay a verdict's certificate with plain exact arithmetic."""
    n = A.shape[0]
    cert = verdict.certificate
    if verdict.kind is Verdict.KERNEL_NONNEG:
        return all(x >= 0 for x in cert) and any(cert) and all(x == 0 for x in A.matvec(cert))
    if verdict.kind is Verdict.POSITIVE_COMBINATION:
        return all(x >= 0 for x in cert) and min(A.vecmat(cert)) >= 1
    if verdict.kind is Verdict.NEGATIVE_ORTHANT:
        if not isinstance(cert, RationalMatrix) or cert.shape != (n, n):
            return False
        return all(x >= 0 for r in cert.rows for x in r) and cert.matmul(A) == RationalMatrix.identity(n).neg()
    return verdict.kind is Verdict.NONE_OF_THREE


def search_kernel_nonneg(A: RationalMatrix) -> Vector | None:
    n = A.shape[1]
    sys = FeasibilitySystem.nonnegative(n)
    sys.add_eq([1] * n, 1)
    for row in A.rows:
        sys.add_eq(row, 0)
    res = solve_feasibility(sys)
    return res.point if res else None


def search_row_combination(A: RationalMatrix, sign: int) -> Vector | None:
    """``a >= 0`` with every component of ``a A`` at least 1 (sign=+1) or at most -1 (sign=-1).

    Scaling to 1 is exact for strict signs because the condition is conic.
    """
    m, n = A.shape
    sys = FeasibilitySystem.nonnegative(m)
    for j in range(n):
        if sign > 0:
            sys.add_ineq(A.column(j), GE, 1)
        else:
            sys.add_ineq(A.column(j), LE, -1)
    res = solve_feasibility(sys)
    return res.point if res else None


def _negated_inverse(A: RationalMatrix) -> RationalMatrix:
    try:
        C = A.inverse().neg()
    except ZeroDivisionError as exc:
        raise TheoremViolation(f"expected an invertible matrix: {A!r}") from exc
    if any(x < 0 for r in C.rows for x in r):
        raise TheoremViolation(f"-A^-1 has a negative entry for {A!r}")
    return C


def trichotomy(A: RationalMatrix) -> TrichotomyVerdict:
    """Certified trichotomy for a strongly diffusive matrix, via LP searches."""
    if not validate_strongly_diffusive(A):
        raise NotStronglyDiffusive(repr(A))
    v = search_kernel_nonneg(A)
    if v is not None:
        return TrichotomyVerdict(Verdict.KERNEL_NONNEG, v)
    a = search_row_combination(A, +1)
    if a is not None:
        return TrichotomyVerdict(Verdict.POSITIVE_COMBINATION, a)
    return TrichotomyVerdict(Verdict.NEGATIVE_ORTHANT, _negated_inverse(A))


def classify_diffusive_general(A: RationalMatrix) -> TrichotomyVerdict:
    """Try all three certificate searches on a (possibly weakly) diffusive matrix."""
    if not validate_diffusive(A):
        raise NotDiffusive(repr(A))
    v = search_kernel_nonneg(A)
    if v is not None:
        return TrichotomyVerdict(Verdict.KERNEL_NONNEG, v)
    a = search_row_combination(A, +1)
    if a is not None:
        return TrichotomyVerdict(Verdict.POSITIVE_COMBINATION, a)
    if search_row_combination(A, -1) is not None:
        # -A is a Z-matrix with a semipositive vector, hence a nonsingular M-matrix
        return TrichotomyVerdict(Verdict.NEGATIVE_ORTHANT, _negated_inverse(A))
    return TrichotomyVerdict(Verdict.NONE_OF_THREE)


def lift_to_strictly_positive(A: RationalMatrix, v: Sequence, coeffs: Sequence) -> tuple[Vector, Vector]:
    """Push a non-negative, non-zero cone vector ``v = coeffs @ A`` into the open orthant.

    Adds ``eps * row_i`` for the first ``i`` with ``v_i > 0``; the off-diagonal
    entries of that row are positive, so only coordinate ``i`` needs
    ``eps < v_i / |a_ii|``. Returns the new vector and its coefficients.
    """
    v, coeffs = as_vector(v), as_vector(coeffs)
    if not validate_strongly_diffusive(A):
        raise NotStronglyDiffusive(repr(A))
    if any(c < 0 for c in coeffs) or any(x < 0 for x in v) or not any(v) or A.vecmat(coeffs) != v:
        raise ValueError("lift_to_strictly_positive: need v = coeffs @ A with v >= 0, v != 0, coeffs >= 0")
    if all(x > 0 for x in v):
        return v, coeffs
    i = next(k for k, x in enumerate(v) if x > 0)
    eps = v[i] / (2 * -A[i, i])
    w = tuple(x + eps * a for x, a in zip(v, A.rows[i]))
    new = list(coeffs)
    new[i] += eps
    return w, tuple(new)


@dataclass
class _Elimination:
    rows: list[list[Fraction]]
    coeffs: list[list[Fraction]]  # rows == coeffs @ A, coeffs >= 0


def _eliminate(A: RationalMatrix, order: Sequence[int]):
    """Gaussian elimination on ``-A`` in the given pivot order.

    Only positive multiples of pivot rows are ever added, so every produced
    row stays in the cone of the rows of ``A``. Stops at the first row that
    became non-negative and returns ``("nonneg", index, state)``; otherwise
    returns ``("diagonal", None, state)`` after full back-substitution.
    """
    n = A.shape[0]
    rows = [[A[i, j] for j in order] for i in order]
    coeffs = [[Fraction(int(order[k] == i)) for i in range(n)] for k in range(n)]
    st = _Elimination(rows, coeffs)

    def combine(dst: int, src: int, col: int) -> None:
        c = -rows[dst][col] / rows[src][col]
        rows[dst] = [a + c * b for a, b in zip(rows[dst], rows[src])]
        coeffs[dst] = [a + c * b for a, b in zip(coeffs[dst], coeffs[src])]

    for p in range(n):
        for q in range(p + 1, n):
            if rows[q][p] != 0:
                combine(q, p, p)
                if all(x >= 0 for x in rows[q]):
                    return "nonneg", q, st
    for p in range(n - 1, -1, -1):
        for q in range(p):
            if rows[q][p] != 0:
                combine(q, p, p)
    return "diagonal", None, st


def elimination_trichotomy(A: RationalMatrix) -> TrichotomyVerdict:
    """Constructive route through elimination and the positive-cone lift.

    Used to cross-check :func:`trichotomy`. A zero row means rank ``n - 1``;
    a sign-definite kernel vector then gives ``KERNEL_NONNEG``, while a
    mixed-sign kernel vector is used to reorder pivots (positive entries
    first), which forces a non-negative non-zero row.
    """
    if not validate_strongly_diffusive(A):
        raise NotStronglyDiffusive(repr(A))
    n = A.shape[0]
    order = list(range(n))
    for attempt in range(2):
        outcome, q, st = _eliminate(A, order)
        if outcome == "nonneg":
            row = st.rows[q]
            if any(row):
                # undo the permutation of columns before lifting
                v = [Fraction(0)] * n
                for k, j in enumerate(order):
                    v[j] = row[k]
                w, a = lift_to_strictly_positive(A, v, st.coeffs[q])
                scale = 1 / min(w)
                return TrichotomyVerdict(Verdict.POSITIVE_COMBINATION, tuple(x * scale for x in a))
            if attempt == 1:
                raise TheoremViolation(f"reordered elimination met a zero row: {A!r}")
            (k,) = kernel_basis(A)  # rank is exactly n - 1 here
            if all(x >= 0 for x in k) or all(x <= 0 for x in k):
                s = sum(k)
                return TrichotomyVerdict(Verdict.KERNEL_NONNEG, tuple(x / s for x in k))
            order = sorted(range(n), key=lambda j: (-k[j], j))
            continue
        # diagonal with negative entries: scale each row to -e_i
        C = [[Fraction(0)] * n for _ in range(n)]
        for k, j in enumerate(order):
            d = st.rows[k][k]
            if d >= 0:
                raise TheoremViolation(f"elimination lost a negative pivot: {A!r}")
            C[j] = [c / -d for c in st.coeffs[k]]
        return TrichotomyVerdict(Verdict.NEGATIVE_ORTHANT, RationalMatrix(C, n))
    raise TheoremViolation("unreachable")
