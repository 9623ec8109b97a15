import math
import random
from fractions import Fraction as F

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from siphonkit.generators import NetworkConfig, random_network, random_weakly_reversible
from siphonkit.network import parse_network
from siphonkit.persistence import (
    PersistenceCertificate,
    Rule,
    SimulationError,
    Verdict,
    certify,
    empirical_persistence_probe,
    mass_action_rhs,
    rule_conditions,
    simulate,
    verify_certificate,
)

from conftest import CORPUS, load


def exact_rhs(net, rates, x):
    """Mass-action right-hand side in exact arithmetic."""
    out = [F(0)] * net.n_species
    for k, r in zip(rates, net.reactions):
        flux = F(k)
        for i, c in r.reactant.items():
            flux *= F(x[i]) ** int(c)
        for i in range(net.n_species):
            out[i] += flux * (r.product.get(i) - r.reactant.get(i))
    return out


def test_certify_examples():
    c = certify(load("persistent_chain.crn"))
    assert (c.verdict, c.rule) == (Verdict.PERSISTENT, Rule.NO_SIPHONS)
    c = certify(load("two_cycle.crn"))
    assert c.verdict is Verdict.INCONCLUSIVE and c.blockers == (frozenset({0, 1}),)
    c = certify(parse_network("X <-> Y"))
    assert (c.verdict, c.rule) == (Verdict.PERSISTENT, Rule.CONSERVATIVE_NO_CRITICAL_SIPHONS)
    assert c.conservation_law.weights == (1, 1)
    c = certify(parse_network("X -> 2X"))
    assert (c.verdict, c.rule) == (Verdict.PERSISTENT, Rule.NO_DRAINABLE_SIPHONS)
    assert certify(parse_network("2X -> X")).verdict is Verdict.INCONCLUSIVE


def test_certificates_replay_over_corpus():
    for path in sorted(CORPUS.glob("*.crn")):
        net = parse_network(path.read_text())
        assert verify_certificate(net, certify(net)) == [], path.name


def test_forged_certificate_rejected():
    net = load("two_cycle.crn")
    c = certify(net)
    forged = PersistenceCertificate(Verdict.PERSISTENT, Rule.NO_DRAINABLE_SIPHONS, c.siphons)
    assert verify_certificate(net, forged)


def test_rules_two_and_four_coincide_on_weakly_reversible():
    rng = random.Random(17)
    for _ in range(40):
        net = random_weakly_reversible(rng)
        c = certify(net)
        holds = rule_conditions(net, c.siphons, None, True)
        assert holds[Rule.NO_DRAINABLE_SIPHONS] == holds[Rule.WEAKLY_REVERSIBLE_NON_AUTOCATALYTIC]


def test_two_cycle_equilibrium_exact():
    net = load("two_cycle.crn")
    assert exact_rhs(net, [1] * 4, [1, 1]) == [0, 0]
    assert np.allclose(mass_action_rhs(net, [1.0] * 4)(np.array([1.0, 1.0])), 0.0)


@pytest.mark.parametrize("t", [1.0, 5.0])
def test_linear_decay_matches_closed_form(t):
    run = simulate(parse_network("X -> Y"), [1], [1, 1], t)
    x, y = run.states[-1]
    assert abs(x - math.exp(-t)) / math.exp(-t) < 1e-6
    assert abs(x + y - 2) < 1e-9 * t


def test_min_concentration_is_a_lower_bound():
    run = simulate(load("ex_x2y.crn"), [1, 2, 0.5, 3], [0.3, 2], 3.0)
    assert run.min_concentration <= run.states.min()


def test_against_scipy_oracle():
    rng = random.Random(23)
    cfg = NetworkConfig(max_species=3, max_coeff=2, max_reactions=4)
    for _ in range(15):
        net = random_network(rng, cfg)
        rates = [rng.uniform(0.5, 2) for _ in net.reactions]
        x0 = [rng.uniform(0.5, 2) for _ in range(net.n_species)]
        f = mass_action_rhs(net, rates)
        try:
            run = simulate(net, rates, x0, 1.0, n_samples=5)
        except SimulationError:
            continue
        ref = solve_ivp(lambda t, x: f(x), (0, 1), x0, method="DOP853", rtol=1e-11, atol=1e-13, t_eval=run.times)
        if not ref.success:
            continue
        assert np.allclose(run.states, ref.y.T, rtol=1e-6, atol=1e-9)


def test_simulation_parameters_checked():
    net = parse_network("X -> Y")
    for rates, x0, t_end in (([0], [1, 1], 1), ([1], [0, 1], 1), ([1], [1, 1], 0), ([1, 1], [1, 1], 1)):
        with pytest.raises(ValueError):
            simulate(net, rates, x0, t_end)


def test_blowup_is_reported():
    with pytest.raises(SimulationError):
        simulate(parse_network("2X -> 3X"), [1], [10], 10.0)


def test_csv_header():
    run = simulate(parse_network("X -> Y"), [1], [1, 1], 1.0, n_samples=3)
    lines = run.to_csv().splitlines()
    assert lines[0] == "t,X,Y" and len(lines) == 4


def test_probe_growth_has_no_flags():
    rep = empirical_persistence_probe(parse_network("X -> 2X"), trials=5, t_end=2.0)
    assert rep.verdict is Verdict.PERSISTENT and rep.discrepancies == []
    assert all(t.final[0] > t.initial[0] for t in rep.trials)


def test_probe_conserved_pair_stays_bounded_below():
    rep = empirical_persistence_probe(parse_network("X <-> Y"), trials=5, t_end=5.0)
    assert rep.discrepancies == [] and min(t.min_concentration for t in rep.trials) > 1e-3


def test_probe_decay_not_flagged_when_inconclusive():
    rep = empirical_persistence_probe(parse_network("2X -> X"), trials=3, t_end=50.0, seed=1)
    assert rep.verdict is Verdict.INCONCLUSIVE and rep.discrepancies == []


def test_probe_is_seeded():
    a = empirical_persistence_probe(load("x_eq_y.crn"), trials=2, t_end=1.0, seed=4)
    b = empirical_persistence_probe(load("x_eq_y.crn"), trials=2, t_end=1.0, seed=4)
    assert a == b


def test_probe_requires_a_trial():
    with pytest.raises(ValueError):
        empirical_persistence_probe(load("x_eq_y.crn"), trials=0)
