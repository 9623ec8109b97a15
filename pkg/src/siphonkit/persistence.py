"""Persistence certificates from siphon structure, plus mass-action simulation.

Certificates are exact. Simulation runs in floating point and is only an
empirical cross-check; nothing it produces feeds a certificate.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .network import ConservationLaw, ReactionNetwork, conservative_law, is_weakly_reversible
from .siphons import SetClassification, classify_set, minimal_siphons, verify_classification


class Verdict(enum.Enum):
    PERSISTENT = "Persistent"
    INCONCLUSIVE = "Inconclusive"


class Rule(enum.Enum):
    NO_SIPHONS = "NoSiphons"
    CONSERVATIVE_NO_CRITICAL_SIPHONS = "ConservativeNoCriticalSiphons"
    NO_DRAINABLE_SIPHONS = "NoDrainableSiphons"
    WEAKLY_REVERSIBLE_NON_AUTOCATALYTIC = "WeaklyReversibleNonAutocatalytic"
    NONE = "None"


@dataclass(frozen=True)
class PersistenceCertificate:
    verdict: Verdict
    rule: Rule
    siphons: tuple[SetClassification, ...]
    blockers: tuple[frozenset[int], ...] = ()
    conservation_law: ConservationLaw | None = None
    weakly_reversible: bool = False
    reason: str = ""


def rule_conditions(net: ReactionNetwork, siphons: Sequence[SetClassification], law, wr: bool) -> dict[Rule, bool]:
    return {
        Rule.NO_SIPHONS: not siphons,
        Rule.CONSERVATIVE_NO_CRITICAL_SIPHONS: law is not None and not any(c.is_critical for c in siphons),
        Rule.NO_DRAINABLE_SIPHONS: not any(c.is_drainable for c in siphons),
        Rule.WEAKLY_REVERSIBLE_NON_AUTOCATALYTIC: wr and not any(c.is_self_replicable for c in siphons),
    }


RULE_ORDER = (
    Rule.NO_SIPHONS,
    Rule.CONSERVATIVE_NO_CRITICAL_SIPHONS,
    Rule.NO_DRAINABLE_SIPHONS,
    Rule.WEAKLY_REVERSIBLE_NON_AUTOCATALYTIC,
)


def certify(net: ReactionNetwork) -> PersistenceCertificate:
    """Apply the sufficient persistence rules to the minimal siphons.

    Only minimal siphons need checking: a siphon inside a drainable siphon is
    drainable, so a drainable siphon forces a drainable minimal one.
    """
    siphons = tuple(classify_set(net, T) for T in minimal_siphons(net))
    law = conservative_law(net)
    wr = is_weakly_reversible(net)
    holds = rule_conditions(net, siphons, law, wr)
    for rule in RULE_ORDER:
        if holds[rule]:
            return PersistenceCertificate(
                Verdict.PERSISTENT, rule, siphons,
                conservation_law=law if rule is Rule.CONSERVATIVE_NO_CRITICAL_SIPHONS else None,
                weakly_reversible=wr,
            )
    blockers = tuple(c.species for c in siphons if c.is_drainable)
    return PersistenceCertificate(
        Verdict.INCONCLUSIVE, Rule.NONE, siphons, blockers=blockers, weakly_reversible=wr,
        reason="some minimal siphon is drainable; no sufficient rule applies",
    )


def verify_certificate(net: ReactionNetwork, cert: PersistenceCertificate) -> list[str]:
    """Independent replay: siphon list, per-siphon certificates, and the rule's premise."""
    errors = []
    if [c.species for c in cert.siphons] != minimal_siphons(net):
        errors.append("minimal siphon list differs")
    for c in cert.siphons:
        errors += verify_classification(net, c)
    if cert.verdict is Verdict.INCONCLUSIVE:
        if not cert.blockers or not all(any(c.species == b and c.is_drainable for c in cert.siphons) for b in cert.blockers):
            errors.append("inconclusive verdict without drainable blockers")
        return errors
    if cert.rule is Rule.NO_SIPHONS and cert.siphons:
        errors.append("NoSiphons with siphons present")
    if cert.rule is Rule.NO_DRAINABLE_SIPHONS and any(c.is_drainable for c in cert.siphons):
        errors.append("NoDrainableSiphons with a drainable siphon")
    if cert.rule is Rule.CONSERVATIVE_NO_CRITICAL_SIPHONS:
        w = cert.conservation_law
        if w is None or min(w.weights, default=0) < 1 or any(net.gamma.matvec(w.weights)):
            errors.append("conservative law invalid")
        if any(c.is_critical for c in cert.siphons):
            errors.append("critical siphon under ConservativeNoCriticalSiphons")
    if cert.rule is Rule.WEAKLY_REVERSIBLE_NON_AUTOCATALYTIC:
        if not is_weakly_reversible(net) or any(c.is_self_replicable for c in cert.siphons):
            errors.append("WeaklyReversibleNonAutocatalytic premise fails")
    return errors


# -- simulation ---------------------------------------------------------------


class SimulationError(RuntimeError):
    pass


# Dormand-Prince 5(4) tableau
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])

NEGATIVE_TOLERANCE = -1e-12
_MIN_STEP = 16 * np.finfo(float).eps


def mass_action_rhs(net: ReactionNetwork, rates: Sequence[float]):
    """Vectorised ``x' = sum_r k_r (y'_r - y_r) x^{y_r}``."""
    n = net.n_species
    Y = np.array([[float(r.reactant.get(i)) for i in range(n)] for r in net.reactions]).reshape(-1, n)
    G = np.array([[float(x) for x in row] for row in net.gamma.rows]).reshape(-1, n)
    k = np.asarray(rates, dtype=float)
    mask = Y > 0

    def f(x: np.ndarray) -> np.ndarray:
        with np.errstate(over="raise", invalid="raise"):
            base = np.where(mask, x[None, :], 1.0)
            mono = np.prod(base**Y, axis=1)
            return (k * mono) @ G

    return f


@dataclass
class SimulationRun:
    rates: tuple[float, ...]
    initial: tuple[float, ...]
    t_end: float
    rtol: float = 1e-10
    atol: float = 1e-12
    n_samples: int = 101
    times: np.ndarray | None = None
    states: np.ndarray | None = None
    min_concentration: float | None = None
    accepted: int = 0
    rejected: int = 0
    species: tuple[str, ...] = ()

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", *self.species])
        for t, x in zip(self.times, self.states):
            w.writerow([repr(float(t)), *(repr(float(v)) for v in x)])
        return buf.getvalue()


def simulate(
    net: ReactionNetwork,
    rates: Sequence,
    initial: Sequence,
    t_end: float,
    *,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    n_samples: int = 101,
    sample_times: Sequence[float] | None = None,
    max_steps: int = 1_000_000,
) -> SimulationRun:
    """Integrate mass-action kinetics with an adaptive Dormand-Prince 5(4) pair.

    Steps are shortened to land exactly on sample times. A step is rejected
    when any component falls below ``-1e-12``; there is no clamping.
    ``min_concentration`` is taken over every accepted step.
    """
    rates = tuple(float(Fraction(k)) if isinstance(k, (str, Fraction)) else float(k) for k in rates)
    x = np.array([float(Fraction(v)) if isinstance(v, (str, Fraction)) else float(v) for v in initial])
    if len(rates) != len(net.reactions) or any(k <= 0 for k in rates):
        raise ValueError("need one strictly positive rate per reaction")
    if len(x) != net.n_species or np.any(x <= 0):
        raise ValueError("initial point must be strictly positive, one value per species")
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if sample_times is None:
        sample_times = np.linspace(0.0, t_end, n_samples)
    samples = np.array(sorted(set(float(t) for t in sample_times) | {0.0, float(t_end)}))
    if samples[0] < 0 or samples[-1] > t_end:
        raise ValueError("sample times must lie in [0, t_end]")

    f = mass_action_rhs(net, rates)
    t = 0.0
    out_t, out_x = [0.0], [x.copy()]
    next_sample = 1
    lowest = float(x.min())
    accepted = rejected = 0
    try:
        with np.errstate(over="raise", invalid="raise"):
            k1 = f(x)
            scale = atol + rtol * np.abs(x)
            d0, d1 = np.linalg.norm(x / scale) / math.sqrt(len(x)), np.linalg.norm(k1 / scale) / math.sqrt(len(x))
            h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
            h = min(h, t_end)
            while next_sample < len(samples):
                if accepted + rejected > max_steps:
                    raise SimulationError("step budget exhausted")
                target = samples[next_sample]
                lands = t + h >= target
                step = target - t if lands else h
                K = [k1]
                for s in range(1, 7):
                    xs = x + step * sum(a * K[j] for j, a in enumerate(_A[s]))
                    K.append(f(xs))
                x5 = x + step * sum(b * Kj for b, Kj in zip(_B5, K))
                err = step * sum((b5 - b4) * Kj for b5, b4, Kj in zip(_B5, _B4, K))
                sc = atol + rtol * np.maximum(np.abs(x), np.abs(x5))
                enorm = float(np.sqrt(np.mean((err / sc) ** 2)))
                if not np.all(np.isfinite(x5)) or not math.isfinite(enorm):
                    raise SimulationError(f"non-finite state at t={t:.6g}")
                if enorm <= 1.0 and x5.min() >= NEGATIVE_TOLERANCE:
                    t = target if lands else t + step
                    x = x5
                    k1 = K[6]
                    accepted += 1
                    lowest = min(lowest, float(x.min()))
                    if lands:
                        out_t.append(t)
                        out_x.append(x.copy())
                        next_sample += 1
                    factor = 5.0 if enorm == 0 else min(5.0, 0.9 * enorm**-0.2)
                    # a step clipped to a sample time says little about the natural scale
                    h = max(step * factor, h) if lands and step < h else step * factor
                else:
                    rejected += 1
                    factor = 0.5 if x5.min() < NEGATIVE_TOLERANCE or not enorm > 0 else max(0.2, 0.9 * enorm ** -0.2)
                    h = step * factor
                if h < _MIN_STEP * max(1.0, abs(t)) or not math.isfinite(h):
                    raise SimulationError(f"step size underflow at t={t:.6g} (finite-time blow-up?)")
    except FloatingPointError as exc:
        raise SimulationError(f"overflow at t={t:.6g}") from exc

    return SimulationRun(
        rates=rates, initial=tuple(out_x[0]), t_end=float(t_end), rtol=rtol, atol=atol,
        n_samples=len(samples), times=np.array(out_t), states=np.array(out_x),
        min_concentration=lowest, accepted=accepted, rejected=rejected, species=net.names,
    )


@dataclass
class ProbeTrial:
    index: int
    rates: tuple[float, ...]
    initial: tuple[float, ...]
    min_concentration: float
    final: tuple[float, ...]
    trending_to_zero: bool


@dataclass
class ProbeReport:
    verdict: Verdict
    seed: int
    t_end: float
    trials: list[ProbeTrial] = field(default_factory=list)
    discrepancies: list[int] = field(default_factory=list)


def _trending_to_zero(run: SimulationRun, floor: float = 1e-6) -> bool:
    """Some species decreases monotonically over the last half and ends below ``floor``."""
    half = run.times >= run.t_end / 2
    tail = run.states[half]
    if len(tail) < 2:
        return False
    dec = np.all(np.diff(tail, axis=0) <= 0, axis=0)
    return bool(np.any(dec & (tail[-1] < floor)))


def empirical_persistence_probe(
    net: ReactionNetwork, trials: int = 10, t_end: float = 10.0, seed: int = 0, n_samples: int = 201
) -> ProbeReport:
    """Random rates and initial points, log-uniform on [0.1, 10].

    A trial trending to zero is a discrepancy only when :func:`certify` says
    Persistent.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    cert = certify(net)
    rng = np.random.default_rng(seed)
    report = ProbeReport(cert.verdict, seed, float(t_end))
    for i in range(trials):
        rates = tuple(10 ** rng.uniform(-1, 1, size=len(net.reactions)))
        x0 = tuple(10 ** rng.uniform(-1, 1, size=net.n_species))
        run = simulate(net, rates, x0, t_end, rtol=1e-8, atol=1e-12, n_samples=n_samples)
        trend = _trending_to_zero(run)
        report.trials.append(ProbeTrial(i, rates, x0, run.min_concentration, tuple(run.states[-1]), trend))
        if trend and cert.verdict is Verdict.PERSISTENT:
            report.discrepancies.append(i)
    return report
