"""JSON analysis report: deterministic serialisation and certificate re-checking.

Exact quantities are rendered as ``"p/q"`` strings (integers as ``"n"``).
:func:`verify_report` rebuilds every certificate from the JSON text alone and
re-checks it with direct arithmetic, never calling the LP solver.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from importlib import resources
from typing import Any

from . import __version__
from .feasibility import Farkas
from .network import (
    ConservationLaw,
    ConsistencyResult,
    ReactionNetwork,
    check_consistency,
    conservation_laws,
    conservative_law,
    is_consistent,
    is_reversible,
    is_weakly_reversible,
)
from .pathways import (
    Catalysis,
    CatalysisFinding,
    PathwayWitness,
    Reach,
    ReachabilityVerdict,
    _complex_from_json,
    _complex_json,
    find_catalytic_sets,
    verify_catalysis,
)
from .persistence import (
    PersistenceCertificate,
    ProbeReport,
    Rule,
    Verdict,
    certify,
    verify_certificate,
)
from .rational import RationalMatrix, fmt
from .siphons import SetClassification


def vec(v) -> list[str] | None:
    return None if v is None else [fmt(x) for x in v]


def unvec(v) -> tuple[Fraction, ...] | None:
    return None if v is None else tuple(Fraction(x) for x in v)


def names(net: ReactionNetwork, T) -> list[str]:
    return net.set_names(T)


def classification_json(net: ReactionNetwork, c: SetClassification) -> dict:
    return {
        "species": names(net, c.species),
        "flags": c.flags(),
        "certificates": {
            "siphon_violation": c.siphon_violation,
            "closed_violation": c.closed_violation,
            "conservation_law": vec(c.conservation_law.weights) if c.conservation_law else None,
            "gordan": vec(c.gordan),
            "self_replication": vec(c.self_replication),
            "no_growth": vec(c.no_growth),
            "drain": vec(c.drain),
            "no_drain": vec(c.no_drain),
        },
    }


def classification_from_json(net: ReactionNetwork, d: dict) -> SetClassification:
    f, c = d["flags"], d["certificates"]
    law = unvec(c["conservation_law"])
    return SetClassification(
        species=net.species_set(d["species"]),
        is_siphon=f["siphon"],
        is_closed=f["closed"],
        is_critical=f["critical"],
        is_drainable=f["drainable"],
        is_self_replicable=f["self_replicable"],
        siphon_violation=c["siphon_violation"],
        closed_violation=c["closed_violation"],
        conservation_law=ConservationLaw(law) if law is not None else None,
        gordan=unvec(c["gordan"]),
        self_replication=unvec(c["self_replication"]),
        no_growth=unvec(c["no_growth"]),
        drain=unvec(c["drain"]),
        no_drain=unvec(c["no_drain"]),
    )


def reach_json(net: ReactionNetwork, v: ReachabilityVerdict) -> dict:
    return {
        "kind": v.kind.value,
        "witness": v.witness.to_json(net) if v.witness else None,
        "farkas": {"eq": vec(v.farkas.eq), "ineq": vec(v.farkas.ineq)} if v.farkas else None,
        "siphon": names(net, v.siphon) if v.siphon is not None else None,
        "explored": v.explored,
        "bound": v.bound,
    }


def reach_from_json(net: ReactionNetwork, d: dict) -> ReachabilityVerdict:
    fk = d["farkas"]
    return ReachabilityVerdict(
        Reach(d["kind"]),
        witness=PathwayWitness.from_json(net, d["witness"]) if d["witness"] else None,
        farkas=Farkas(unvec(fk["eq"]), unvec(fk["ineq"])) if fk else None,
        siphon=net.species_set(d["siphon"]) if d["siphon"] is not None else None,
        explored=d["explored"],
        bound=d["bound"],
    )


def catalysis_json(net: ReactionNetwork, f: CatalysisFinding) -> dict:
    return {
        "species": names(net, f.species),
        "kind": f.kind.value,
        "pathway": f.pathway.to_json(net),
        "bare_source": _complex_json(net, f.bare_source),
        "bare_target": _complex_json(net, f.bare_target),
        "unreachable": reach_json(net, f.unreachable),
        "strict_reason": f.strict_reason,
        "siphon": names(net, f.siphon) if f.siphon is not None else None,
        "k_tested": f.k_tested,
        "counter_k": f.counter_k,
        "counter_witness": f.counter_witness.to_json(net) if f.counter_witness else None,
        "notes": list(f.notes),
    }


def catalysis_from_json(net: ReactionNetwork, d: dict) -> CatalysisFinding:
    return CatalysisFinding(
        species=net.species_set(d["species"]),
        kind=Catalysis(d["kind"]),
        pathway=PathwayWitness.from_json(net, d["pathway"]),
        bare_source=_complex_from_json(net, d["bare_source"]),
        bare_target=_complex_from_json(net, d["bare_target"]),
        unreachable=reach_from_json(net, d["unreachable"]),
        strict_reason=d["strict_reason"],
        siphon=net.species_set(d["siphon"]) if d["siphon"] is not None else None,
        k_tested=d["k_tested"],
        counter_k=d["counter_k"],
        counter_witness=PathwayWitness.from_json(net, d["counter_witness"]) if d["counter_witness"] else None,
        notes=list(d["notes"]),
    )


def persistence_json(net: ReactionNetwork, cert: PersistenceCertificate) -> dict:
    return {
        "verdict": cert.verdict.value,
        "rule": cert.rule.value,
        "blockers": [names(net, b) for b in cert.blockers],
        "conservation_law": vec(cert.conservation_law.weights) if cert.conservation_law else None,
        "reason": cert.reason,
    }


def probe_json(net: ReactionNetwork, p: ProbeReport) -> dict:
    return {
        "verdict": p.verdict.value,
        "seed": p.seed,
        "t_end": repr(p.t_end),
        "discrepancies": list(p.discrepancies),
        "trials": [
            {
                "index": t.index,
                "rates": [repr(float(k)) for k in t.rates],
                "initial": [repr(float(x)) for x in t.initial],
                "min_concentration": repr(float(t.min_concentration)),
                "final": [repr(float(x)) for x in t.final],
                "trending_to_zero": t.trending_to_zero,
            }
            for t in p.trials
        ],
    }


def build_report(
    net: ReactionNetwork,
    source_text: str | None = None,
    catalysis: bool = False,
    bound: int = 64,
    probe: ProbeReport | None = None,
) -> dict[str, Any]:
    text = source_text if source_text is not None else net.to_text()
    cons = is_consistent(net)
    law = conservative_law(net)
    cert = certify(net)
    report: dict[str, Any] = {
        "tool": {"name": "siphonkit", "version": __version__},
        "input_digest": "sha256:" + hashlib.sha256(text.encode()).hexdigest(),
        "network": {
            "species": list(net.names),
            "reactions": [net.render_reaction(r) for r in net.reactions],
            "reversible": is_reversible(net),
            "weakly_reversible": is_weakly_reversible(net),
            "consistent": cons.consistent,
            "consistency_vector": vec(cons.vector),
            "consistency_refutation": vec(cons.refutation),
            "conservative": law is not None,
            "conservative_law": vec(law.weights) if law else None,
        },
        "conservation_laws": [vec(w.weights) for w in conservation_laws(net)],
        "minimal_siphons": [classification_json(net, c) for c in cert.siphons],
        "persistence": persistence_json(net, cert),
        "catalysis": None,
        "probe": probe_json(net, probe) if probe is not None else None,
    }
    if catalysis:
        if net.is_chemical():
            findings = [catalysis_json(net, f) for f in find_catalytic_sets(net, bound)]
            report["catalysis"] = {"bound": bound, "findings": findings, "note": ""}
        else:
            note = "fractional coefficients: pathway search skipped"
            report["catalysis"] = {"bound": bound, "findings": [], "note": note}
    return report


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_schema() -> dict:
    return json.loads(resources.files("siphonkit").joinpath("report.schema.json").read_text())


def verify_report(net: ReactionNetwork, report: dict) -> list[str]:
    """Re-check every certificate in a (deserialised) report; return the failures."""
    errors: list[str] = []
    G = net.gamma
    nw = report["network"]
    if nw["species"] != list(net.names):
        errors.append("species list differs from the network")
    if nw["reversible"] != is_reversible(net):
        errors.append("reversible flag")
    if nw["weakly_reversible"] != is_weakly_reversible(net):
        errors.append("weakly_reversible flag")
    cons = ConsistencyResult(nw["consistent"], unvec(nw["consistency_vector"]), unvec(nw["consistency_refutation"]))
    if not check_consistency(net, cons):
        errors.append("consistency certificate")
    if nw["conservative"]:
        w = unvec(nw["conservative_law"])
        if w is None or min(w, default=0) < 1 or any(G.matvec(w)):
            errors.append("conservative law")
    elif conservative_law(net) is not None:
        errors.append("conservative flag")

    basis = [unvec(w) for w in report["conservation_laws"]]
    if any(any(G.matvec(w)) for w in basis):
        errors.append("conservation law not orthogonal to the reaction vectors")
    expected = net.n_species - G.rank()
    if len(basis) != expected or (basis and RationalMatrix(basis).rank() != expected):
        errors.append("conservation law basis has the wrong dimension")

    siphons = [classification_from_json(net, d) for d in report["minimal_siphons"]]
    p = report["persistence"]
    law = unvec(p["conservation_law"])
    cert = PersistenceCertificate(
        Verdict(p["verdict"]),
        Rule(p["rule"]),
        tuple(siphons),
        blockers=tuple(net.species_set(b) for b in p["blockers"]),
        conservation_law=ConservationLaw(law) if law is not None else None,
    )
    errors += verify_certificate(net, cert)

    if report.get("catalysis"):
        for d in report["catalysis"]["findings"]:
            if not verify_catalysis(net, catalysis_from_json(net, d)):
                errors.append(f"catalysis finding {d['species']}")
    return errors
