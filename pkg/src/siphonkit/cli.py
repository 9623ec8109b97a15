"""Command-line frontend.

Exit codes: 0 success, 2 bad input (parse errors, unknown species, bad
arguments), 3 internal invariant violation or failed self-verification.
"""

from __future__ import annotations

import argparse
import json
import sys
from itertools import combinations
from pathlib import Path

from . import __version__
from .diffusive import (
    NotDiffusive,
    TheoremViolation,
    Verdict as TVerdict,
    classify_diffusive_general,
    trichotomy,
    validate_diffusive,
    validate_strongly_diffusive,
)
from .network import ParseError, ReactionNetwork, parse_network
from .pathways import (
    DEFAULT_BOUND,
    PathwayError,
    PathwayWitness,
    bounded_reach,
    populations,
    replay,
    verify_reachability,
)
from .persistence import certify, empirical_persistence_probe, simulate, verify_certificate
from .rational import RationalMatrix, fmt, parse_rational
from .report import build_report, classification_json, dumps, persistence_json, reach_json, verify_report
from .siphons import InvariantViolation, classify_set, is_siphon, minimal_siphons, verify_classification

EXIT_INPUT = 2
EXIT_INTERNAL = 3


class InputError(ValueError):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(str(exc)) from exc


def _load(path: str) -> tuple[ReactionNetwork, str]:
    text = _read(path)
    return parse_network(text), text


def _braces(net: ReactionNetwork, T) -> str:
    return "{" + ",".join(net.set_names(T)) + "}"


def _floats(arg: str, n: int, what: str) -> list[float]:
    vals = [float(parse_rational(x)) for x in arg.split(",") if x.strip()]
    if len(vals) != n:
        raise InputError(f"{what}: expected {n} values, got {len(vals)}")
    return vals


def _emit(args, payload: dict, text: str) -> None:
    sys.stdout.write(dumps(payload) if args.json else text.rstrip("\n") + "\n")


def cmd_analyze(args) -> int:
    net, text = _load(args.file)
    probe = None
    if args.probe:
        probe = empirical_persistence_probe(net, trials=args.probe, t_end=args.t_end, seed=args.seed)
    report = build_report(net, text, catalysis=args.catalysis, bound=args.bound, probe=probe)
    out = dumps(report)
    if args.text:
        lines = [
            f"species: {' '.join(net.names)}",
            f"reactions: {len(net.reactions)}",
            f"weakly reversible: {report['network']['weakly_reversible']}",
            f"consistent: {report['network']['consistent']}",
            f"conservative: {report['network']['conservative']}",
        ]
        for c in report["minimal_siphons"]:
            flags = " ".join(k if v else f"¬{k}" for k, v in c["flags"].items())
            lines.append(f"minimal siphon {{{','.join(c['species'])}}}: {flags}")
        p = report["persistence"]
        lines.append(f"persistence: {p['verdict']} ({p['rule']})")
        for f in (report["catalysis"] or {}).get("findings", []):
            lines.append(f"catalysis {{{','.join(f['species'])}}}: {f['kind']}")
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        sys.stdout.write(out)
    if args.verify:
        errors = verify_report(net, json.loads(out))
        for e in errors:
            print(f"verify: {e}", file=sys.stderr)
        print(f"verify: {len(errors)} failure(s)", file=sys.stderr)
        if errors:
            return EXIT_INTERNAL
    return 0


def _all_siphons(net: ReactionNetwork) -> list[frozenset[int]]:
    n = net.n_species
    if n > 20:
        raise InputError("listing all siphons is limited to 20 species; use --minimal")
    return [frozenset(c) for k in range(1, n + 1) for c in combinations(range(n), k) if is_siphon(net, c)]


def cmd_siphons(args) -> int:
    net, _ = _load(args.file)
    sets = minimal_siphons(net) if args.minimal else _all_siphons(net)
    _emit(args, {"siphons": [net.set_names(T) for T in sets]}, "\n".join(_braces(net, T) for T in sets) or "(none)")
    return 0


def cmd_classify(args) -> int:
    net, _ = _load(args.file)
    T = net.species_set(args.set)
    c = classify_set(net, T)
    errors = verify_classification(net, c)
    if errors:
        raise InvariantViolation("; ".join(errors))
    f = c.flags()
    words = [k.replace("_", "-") if f[k] else "¬" + k.replace("_", "-") for k in ("siphon", "critical", "drainable", "self_replicable")]
    text = " ".join(words) + "\n" + ("closed" if f["closed"] else "¬closed")
    _emit(args, classification_json(net, c), text)
    return 0


def cmd_certify(args) -> int:
    net, _ = _load(args.file)
    cert = certify(net)
    errors = verify_certificate(net, cert)
    if errors:
        raise InvariantViolation("; ".join(errors))
    lines = [f"{cert.verdict.value} ({cert.rule.value})"]
    lines += [f"blocker: {_braces(net, b)} drainable" for b in cert.blockers]
    if cert.conservation_law:
        lines.append("conservation law: " + " ".join(fmt(x) for x in cert.conservation_law.weights))
    _emit(args, persistence_json(net, cert), "\n".join(lines))
    return 0


def cmd_simulate(args) -> int:
    net, _ = _load(args.file)
    rates = _floats(args.rates, len(net.reactions), "--rates")
    x0 = _floats(args.x0, net.n_species, "--x0")
    run = simulate(net, rates, x0, args.t_end, n_samples=args.samples)
    csv_text = run.to_csv()
    if args.out:
        Path(args.out).write_text(csv_text)
        print(f"wrote {len(run.times)} samples to {args.out}; min concentration {run.min_concentration!r}")
    else:
        sys.stdout.write(csv_text)
    return 0


def _render_cert(cert) -> str:
    if cert is None:
        return "(none)"
    if isinstance(cert, RationalMatrix):
        return "\n".join(" ".join(fmt(x) for x in row) for row in cert.rows)
    return " ".join(fmt(x) for x in cert)


def cmd_trichotomy(args) -> int:
    A = RationalMatrix.from_text(_read(args.matrix))
    if not A.is_square:
        raise InputError(f"expected a square matrix, got shape {A.shape}")
    if not validate_diffusive(A):
        raise InputError("matrix is not diffusive (needs a non-positive diagonal and non-negative off-diagonal)")
    strong = validate_strongly_diffusive(A)
    v = trichotomy(A) if strong else classify_diffusive_general(A)
    ok = v.kind is TVerdict.NONE_OF_THREE or v.check(A)
    if not ok:
        raise TheoremViolation("certificate failed its replay check")
    head = v.kind.value + ("" if strong else " (input diffusive, not strongly diffusive)")
    payload = {
        "verdict": v.kind.value,
        "strongly_diffusive": strong,
        "certificate": None if v.certificate is None else (
            [[fmt(x) for x in r] for r in v.certificate.rows]
            if isinstance(v.certificate, RationalMatrix) else [fmt(x) for x in v.certificate]
        ),
        "verified": ok,
    }
    text = f"{head}\ncertificate:\n{_render_cert(v.certificate)}\nself-check: {'ok' if ok else 'FAILED'}"
    _emit(args, payload, text)
    return 0


def cmd_pathway(args) -> int:
    net, _ = _load(args.file)
    src, tgt = net.complex_from_text(args.src), net.complex_from_text(args.dst)
    v = bounded_reach(net, src, tgt, bound=args.bound)
    if not verify_reachability(net, src, tgt, v):
        raise InvariantViolation("reachability verdict failed its replay check")
    lines = [v.kind.value]
    if v.witness is not None:
        pops = populations(net, v.witness)
        lines.append(f"{len(v.witness.steps)}-step witness:")
        for step, before, after in zip(v.witness.steps, pops, pops[1:]):
            r = net.render_reaction(net.reactions[step.reaction_index])
            lines.append(f"  {net.render_complex(before)} => {net.render_complex(after)}   [{r}]")
        if args.witness_out:
            Path(args.witness_out).write_text(json.dumps(v.witness.to_json(net), sort_keys=True, indent=2) + "\n")
    elif v.farkas is not None:
        lines.append("cone certificate: " + _render_cert(v.farkas.eq) + " | " + _render_cert(v.farkas.ineq))
    elif v.siphon is not None:
        lines.append(f"separating siphon: {_braces(net, v.siphon)}")
    elif v.explored is not None:
        lines.append(f"reachable set exhausted after {v.explored} states")
    elif v.bound is not None:
        lines.append(f"no pathway within {v.bound} firings")
    _emit(args, reach_json(net, v), "\n".join(lines))
    return 0


def cmd_replay(args) -> int:
    net, _ = _load(args.file)
    try:
        w = PathwayWitness.from_json(net, json.loads(_read(args.witness)))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise InputError(f"malformed witness: {exc}") from exc
    try:
        end = replay(net, w)
    except PathwayError as exc:
        print(f"invalid witness: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    _emit(
        args,
        {"valid": True, "start": net.render_complex(w.start), "end": net.render_complex(end), "steps": len(w.steps)},
        f"valid: {net.render_complex(w.start)} =>* {net.render_complex(end)} in {len(w.steps)} steps",
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    mode = argparse.ArgumentParser(add_help=False)
    g = mode.add_mutually_exclusive_group()
    g.add_argument("--json", action="store_true", help="JSON output")
    g.add_argument("--text", action="store_true", help="plain text output")

    p = argparse.ArgumentParser(prog="siphonkit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"siphonkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[mode], help="full JSON analysis report")
    a.add_argument("file")
    a.add_argument("--catalysis", action="store_true")
    a.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    a.add_argument("--verify", action="store_true", help="re-check every certificate in the emitted report")
    a.add_argument("--probe", type=int, default=0, metavar="TRIALS", help="attach a simulation probe")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--t-end", type=float, default=10.0)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("siphons", parents=[mode], help="list siphons")
    s.add_argument("file")
    s.add_argument("--minimal", action="store_true")
    s.set_defaults(func=cmd_siphons)

    c = sub.add_parser("classify", parents=[mode], help="classify one species set")
    c.add_argument("file")
    c.add_argument("--set", required=True, help='comma-separated species, e.g. "X,Y"')
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("certify", parents=[mode], help="persistence certificate")
    c.add_argument("file")
    c.set_defaults(func=cmd_certify)

    m = sub.add_parser("simulate", help="mass-action trajectory as CSV")
    m.add_argument("file")
    m.add_argument("--rates", required=True, help="k1,k2,... by reaction order")
    m.add_argument("--x0", required=True, help="v1,v2,... by species order")
    m.add_argument("--t-end", type=float, required=True)
    m.add_argument("--samples", type=int, default=101)
    m.add_argument("--out")
    m.set_defaults(func=cmd_simulate)

    t = sub.add_parser("trichotomy", parents=[mode], help="classify a diffusive matrix")
    t.add_argument("matrix")
    t.set_defaults(func=cmd_trichotomy)

    w = sub.add_parser("pathway", parents=[mode], help="bounded reachability between complexes")
    w.add_argument("file")
    w.add_argument("--from", dest="src", required=True)
    w.add_argument("--to", dest="dst", required=True)
    w.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    w.add_argument("--witness-out")
    w.set_defaults(func=cmd_pathway)

    r = sub.add_parser("replay", parents=[mode], help="re-verify a witness file")
    r.add_argument("file")
    r.add_argument("witness")
    r.set_defaults(func=cmd_replay)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if not hasattr(args, "json"):
        args.json = False
    try:
        return args.func(args)
    except AssertionError as exc:  # InvariantViolation, TheoremViolation
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, NotDiffusive, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
