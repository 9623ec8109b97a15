import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from siphonkit.generators import NetworkConfig, random_network, random_weakly_reversible
from siphonkit.network import (
    Complex,
    ParseError,
    ReactionNetwork,
    Species,
    check_consistency,
    complexes,
    conservation_laws,
    conservative_law,
    is_consistent,
    is_reversible,
    is_weakly_reversible,
    opposite_network,
    parse_network,
    positive_conservation_law,
    stoichiometric_matrix,
)

from conftest import load

TWO_CYCLE = "species: X Y\nX <-> 2Y\n2X <-> Y\n"


def rows(net):
    return [tuple(r) for r in stoichiometric_matrix(net).rows]


def test_parse_forward_only():
    net = parse_network("Y -> 2X\n2Y -> X")
    assert net.names == ("Y", "X") and len(net.reactions) == 2


def test_parse_fractional_coefficients():
    net = parse_network("0.3 X + 2.14 Y -> 1.1 Z")
    r = net.reactions[0]
    assert r.reactant.vector(3) == (F(3, 10), F(107, 50), 0)
    assert r.product.vector(3) == (0, 0, F(11, 10))
    assert not net.is_chemical()


def test_parse_reversible_expansion():
    net = parse_network("X <-> 2Y")
    assert [net.render_reaction(r) for r in net.reactions] == ["X -> 2 Y", "2 Y -> X"]


def test_parse_empty_complex():
    net = parse_network("0 -> X\nX -> 0")
    assert net.reactions[0].reactant == Complex()


@pytest.mark.parametrize(
    "text",
    ["", "# only a comment\n", "X -> X", "X -> Y\nX -> Y", "-1 X -> Y", "0 X -> Y", "X => Y", "X -> Y -> Z",
     "X -> 2 3Y", "X -> Y\nspecies: X Y", "X + -> Y", " -> Y"],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_network(text)


def test_parse_error_position():
    with pytest.raises(ParseError) as exc:
        parse_network("X -> Y\nX + ?? -> Y")
    assert exc.value.line == 2


def test_species_header_fixes_order():
    net = parse_network("species: X Y\nY -> 2X")
    assert net.names == ("X", "Y")
    assert rows(net) == [(2, -1)]


def test_stoichiometric_rows():
    assert rows(parse_network("X -> 2Y")) == [(-1, 2)]
    assert rows(parse_network("species: X Y\nY -> 2X\n2Y -> X")) == [(2, -1), (1, -2)]


def test_empty_reaction_list():
    net = ReactionNetwork((Species(0, "X"),), ())
    assert stoichiometric_matrix(net).shape == (0, 1)
    assert [c.weights for c in conservation_laws(net)] == [(1,)]


def test_conservation_bases():
    assert [c.weights for c in conservation_laws(parse_network("X <-> Y"))] == [(1, 1)]
    assert [c.weights for c in conservation_laws(load("ex_counter.crn"))] == [(0, 1)]
    assert conservation_laws(load("ex_x2y.crn")) == []


def test_positive_conservation_law():
    net = parse_network("X -> Y")
    assert positive_conservation_law(net, {0, 1}).weights == (F(1, 2), F(1, 2))
    assert positive_conservation_law(load("ex_x2y.crn"), {0, 1}) is None
    assert positive_conservation_law(load("ex_counter.crn"), {1}).weights == (0, 1)


def test_reversibility():
    assert (is_reversible(load("ex_x2y.crn")), is_weakly_reversible(load("ex_x2y.crn"))) == (True, True)
    assert (is_reversible(load("ex_cds.crn")), is_weakly_reversible(load("ex_cds.crn"))) == (False, False)
    cyc = parse_network("X -> Y\nY -> Z\nZ -> X")
    assert (is_reversible(cyc), is_weakly_reversible(cyc)) == (False, True)


def test_consistency_examples():
    assert is_consistent(load("two_cycle.crn"))
    bad = is_consistent(load("ex_cds.crn"))
    assert not bad and check_consistency(load("ex_cds.crn"), bad)
    assert is_consistent(parse_network("X -> Y\nY -> X")).vector == (1, 1)


def test_opposite_network():
    opp = opposite_network(parse_network("X -> 2Y"))
    assert opp.render_reaction(opp.reactions[0]) == "2 Y -> X"
    rev = load("ex_x2y.crn")
    assert set(opposite_network(rev).reactions) == set(rev.reactions)


def test_conservative_law_has_full_support():
    assert conservative_law(parse_network("X <-> Y")).weights == (1, 1)
    assert conservative_law(load("two_cycle.crn")) is None


def _weakly_reversible_brute(net):
    """Every reaction lies on a directed cycle: DFS reachability back to the reactant."""
    succ = {}
    for r in net.reactions:
        succ.setdefault(r.reactant, set()).add(r.product)

    def reach(a, b):
        seen, stack = {a}, [a]
        while stack:
            x = stack.pop()
            if x == b:
                return True
            for y in succ.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return False

    return all(reach(r.product, r.reactant) for r in net.reactions)


def test_weak_reversibility_against_brute_force():
    rng = random.Random(7)
    cfg = NetworkConfig(max_species=3, max_coeff=2, max_reactions=6)
    for _ in range(300):
        net = random_network(rng, cfg) if rng.random() < 0.5 else random_weakly_reversible(rng, cfg)
        assert len(complexes(net)) <= 12
        assert is_weakly_reversible(net) == _weakly_reversible_brute(net)


def test_random_consistency_certificates():
    rng = random.Random(11)
    for _ in range(200):
        net = random_network(rng)
        res = is_consistent(net)
        assert check_consistency(net, res)
        if is_weakly_reversible(net):
            assert res.consistent


@settings(max_examples=100, derandomize=True, deadline=None)
@given(st.integers(0, 10_000))
def test_render_reparse_roundtrip(seed):
    net = random_network(random.Random(seed))
    again = parse_network(net.to_text())
    assert again.names == net.names
    assert again.reactions == net.reactions


def test_render_keeps_fractions():
    net = parse_network("0.3 X + 2.14 Y -> 1.1 Z")
    assert parse_network(net.to_text()).reactions == net.reactions
