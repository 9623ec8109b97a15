from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from siphonkit.feasibility import GE, LE, Farkas, FeasibilitySystem, check_farkas, solve_feasibility


def fourier_motzkin(sys: FeasibilitySystem) -> bool:
    """Independent exact oracle: eliminate variables from ``row . x <= b``."""
    cons = []
    for r, b in sys.equalities:
        cons += [(list(r), b), ([-x for x in r], -b)]
    for r, rel, b in sys.inequalities:
        cons.append((list(r), b) if rel == LE else ([-x for x in r], -b))
    for j in sys.nonneg:
        cons.append(([F(-(k == j)) for k in range(sys.n_vars)], F(0)))
    for j in range(sys.n_vars):
        pos = [c for c in cons if c[0][j] > 0]
        neg = [c for c in cons if c[0][j] < 0]
        keep = [c for c in cons if c[0][j] == 0]
        for rp, bp in pos:
            for rn, bn in neg:
                s, t = -rn[j], rp[j]
                keep.append(([s * a + t * b for a, b in zip(rp, rn)], s * bp + t * bn))
        cons = keep
    return all(b >= 0 for _, b in cons)


@st.composite
def systems(draw):
    n = draw(st.integers(1, 3))
    sys = FeasibilitySystem(n, nonneg=frozenset(draw(st.sets(st.integers(0, n - 1)))))
    coef = st.integers(-3, 3)
    for _ in range(draw(st.integers(0, 2))):
        sys.add_eq(draw(st.lists(coef, min_size=n, max_size=n)), draw(coef))
    for _ in range(draw(st.integers(0, 3))):
        sys.add_ineq(draw(st.lists(coef, min_size=n, max_size=n)), draw(st.sampled_from([GE, LE])), draw(coef))
    return sys


def test_contradictory_bounds_give_farkas():
    sys = FeasibilitySystem(1)
    sys.add_ineq([1], GE, 1)
    sys.add_ineq([-1], GE, 1)
    res = solve_feasibility(sys)
    assert not res
    assert check_farkas(sys, res.farkas)


def test_free_variable_can_be_negative():
    sys = FeasibilitySystem(1)
    sys.add_eq([1], -5)
    res = solve_feasibility(sys)
    assert res and res.point == (F(-5),)


def test_bogus_farkas_rejected():
    sys = FeasibilitySystem.nonnegative(1)
    sys.add_ineq([1], GE, 1)
    assert not check_farkas(sys, Farkas((), (F(1),)))


def test_row_length_checked():
    with pytest.raises(ValueError):
        FeasibilitySystem(2).add_eq([1], 0)


@settings(max_examples=400, derandomize=True, deadline=None)
@given(systems())
def test_agrees_with_fourier_motzkin(sys):
    res = solve_feasibility(sys)
    assert res.feasible == fourier_motzkin(sys)
    if res:
        assert sys.is_satisfied_by(res.point)
    else:
        assert check_farkas(sys, res.farkas)
