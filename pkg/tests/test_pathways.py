import random
from fractions import Fraction as F

import pytest

from siphonkit.generators import NetworkConfig, random_network
from siphonkit.network import Complex, conservation_laws, parse_network
from siphonkit.pathways import (
    Catalysis,
    Dilution,
    PathwayError,
    PathwayWitness,
    Reach,
    bounded_reach,
    find_catalytic_sets,
    fire,
    replay,
    strictly_catalytic_from_self_replicable_siphon,
    verify_catalysis,
    verify_reachability,
    witness_from_coefficients,
)
from siphonkit.siphons import is_siphon, self_replication_certificate

from conftest import load

X, Y = 0, 1


def cx(net, text):
    return net.complex_from_text(text)


def test_replay_reference_pathway():
    net = load("ex_x2y.crn")  # X->2Y, 2Y->X, 2X->Y, Y->2X
    w = PathwayWitness(cx(net, "2X"), (
        Dilution(0, cx(net, "X")),
        Dilution(3, cx(net, "X + Y")),
        Dilution(3, cx(net, "3X")),
    ))
    assert replay(net, w) == cx(net, "5X")


def test_replay_empty_steps():
    net = load("ex_x2y.crn")
    assert replay(net, PathwayWitness(cx(net, "X + Y"))) == cx(net, "X + Y")


def test_replay_growth_pathway():
    net = load("ex_x2y.crn")
    w = PathwayWitness(cx(net, "2X + 2Y"), (Dilution(0, cx(net, "X + 2Y")), Dilution(3, cx(net, "X + 3Y"))))
    assert replay(net, w) == cx(net, "3X + 3Y")


def test_replay_rejects_bad_bookkeeping():
    net = load("ex_x2y.crn")
    with pytest.raises(PathwayError):
        replay(net, PathwayWitness(cx(net, "2X"), (Dilution(0, Complex()),)))
    with pytest.raises(PathwayError):
        replay(net, PathwayWitness(cx(net, "2X"), (Dilution(9, cx(net, "X")),)))


def test_witness_displacement_example():
    net = load("ex_x2y.crn")
    w = witness_from_coefficients(net, (1, 0, 0, 1))
    end = replay(net, w)
    assert tuple(end.get(i) - w.start.get(i) for i in range(2)) == (1, 1)
    w = witness_from_coefficients(net, (1, 0, 1, 0))
    end = replay(net, w)
    assert tuple(end.get(i) - w.start.get(i) for i in range(2)) == (-3, 3)


def test_witness_from_self_replication_certificate():
    net = load("ex_x2y.crn")
    a = self_replication_certificate(net, {X, Y})
    w = witness_from_coefficients(net, a)
    end = replay(net, w)
    assert all(end.get(i) > w.start.get(i) for i in (X, Y))


def test_witness_single_reaction():
    net = parse_network("X -> 2X")
    w = witness_from_coefficients(net, (1,))
    assert w.start == cx(net, "X") and replay(net, w) == cx(net, "2X")


def test_witness_rejects_zero():
    with pytest.raises(ValueError):
        witness_from_coefficients(parse_network("X -> 2X"), (0,))


def test_witness_json_roundtrip():
    net = load("ex_x2y.crn")
    w = witness_from_coefficients(net, (F(1, 2), 0, 0, F(1, 3)))
    assert PathwayWitness.from_json(net, w.to_json(net)) == w


def test_reach_reference_examples():
    net = load("ex_x2y.crn")
    v = bounded_reach(net, cx(net, "2X"), cx(net, "5X"), bound=10)
    assert v.kind is Reach.REACHABLE and len(v.witness.steps) == 3
    net = load("catalysis_not_strict.crn")
    v = bounded_reach(net, cx(net, "X"), Complex(), bound=8)
    assert v.kind in (Reach.UNREACHABLE_BY_CONE, Reach.UNREACHABLE_EXHAUSTIVE, Reach.UNKNOWN)
    assert verify_reachability(net, cx(net, "X"), Complex(), v)
    v = bounded_reach(net, cx(net, "3X"), Complex(), bound=8)
    assert v.kind is Reach.REACHABLE


@pytest.mark.parametrize("k", [1, 2, 5])
def test_strict_example_blocks_every_multiple(k):
    net = load("catalysis_strict.crn")
    src = cx(net, f"{k} X")
    v = bounded_reach(net, src, Complex())
    assert v.unreachable and verify_reachability(net, src, Complex(), v)


def test_siphon_separation_verdict():
    # 2Y -> 2X passes the cone test, but only X makes X
    net = parse_network("species: X Y\nX + Y -> 2X\nX -> Y")
    v = bounded_reach(net, cx(net, "2Y"), cx(net, "2X"))
    assert v.kind is Reach.UNREACHABLE_BY_SIPHON
    assert is_siphon(net, v.siphon) and X in v.siphon


def test_cone_refutation():
    net = parse_network("X -> 2X")
    v = bounded_reach(net, cx(net, "2X"), cx(net, "X"))
    assert v.kind is Reach.UNREACHABLE_BY_CONE
    assert verify_reachability(net, cx(net, "2X"), cx(net, "X"), v)


def test_fractional_parts_must_match():
    net = parse_network("X -> 2X")
    v = bounded_reach(net, cx(net, "1/2 X"), cx(net, "2X"))
    assert v.kind is Reach.UNREACHABLE_BY_INTEGRALITY
    v = bounded_reach(net, cx(net, "3/2 X"), cx(net, "5/2 X"))
    assert v.kind is Reach.REACHABLE and replay(net, v.witness) == cx(net, "5/2 X")


def test_reach_preconditions():
    with pytest.raises(ValueError):
        bounded_reach(parse_network("X -> Y"), Complex(), Complex(), bound=0)
    net = load("fractional.crn")
    with pytest.raises(ValueError):
        bounded_reach(net, Complex(), Complex())


def test_tampered_verdicts_fail():
    net = load("ex_x2y.crn")
    v = bounded_reach(net, cx(net, "2X"), cx(net, "5X"))
    assert not verify_reachability(net, cx(net, "2X"), cx(net, "4X"), v)


def findings(net):
    return {tuple(sorted(f.species)): f for f in find_catalytic_sets(net)}


def test_catalytic_not_strict():
    net = load("catalysis_not_strict.crn")
    f = findings(net)[(Y,)]
    assert f.kind is Catalysis.CATALYTIC
    assert f.counter_k == 3 and replay(net, f.counter_witness) == Complex()
    assert verify_catalysis(net, f)


def test_strictly_catalytic_examples():
    for name, species in (("catalysis_strict.crn", (Y,)), ("counter_catalytic.crn", (X,))):
        net = load(name)
        f = findings(net)[species]
        assert f.kind is Catalysis.STRICTLY_CATALYTIC
        assert verify_catalysis(net, f)


def test_from_self_replicable_siphon():
    net = load("ex_x2y.crn")
    a = self_replication_certificate(net, {X, Y})
    T, f = strictly_catalytic_from_self_replicable_siphon(net, {X, Y}, a)
    assert T >= {X, Y} and f.kind is Catalysis.STRICTLY_CATALYTIC
    assert verify_catalysis(net, f)


def test_from_self_replicable_siphon_precondition():
    net = load("ex_counter.crn")
    assert self_replication_certificate(net, {Y}) is None
    with pytest.raises(ValueError):
        strictly_catalytic_from_self_replicable_siphon(net, {Y}, (1, 1, 1, 1))


def random_witness(rng, net, steps=6):
    start = Complex((i, rng.randint(0, 4)) for i in range(net.n_species))
    pop, out = start, []
    for _ in range(steps):
        ks = [k for k in range(len(net.reactions)) if fire(net, pop, k) is not None]
        if not ks:
            break
        k = rng.choice(ks)
        out.append(Dilution(k, pop - net.reactions[k].reactant))
        pop = fire(net, pop, k)
    return PathwayWitness(start, tuple(out))


def test_conservation_along_pathways():
    rng = random.Random(3)
    cfg = NetworkConfig(max_species=4, max_coeff=2)
    for _ in range(200):
        net = random_network(rng, cfg)
        w = random_witness(rng, net)
        end = replay(net, w)
        for law in conservation_laws(net):
            lw = law.weights
            assert sum(lw[i] * w.start.get(i) for i in range(net.n_species)) == sum(
                lw[i] * end.get(i) for i in range(net.n_species))
