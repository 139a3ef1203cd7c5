"""Command-line entry point.

Subcommands: gen (benchmark instances), encode (ontology schema to
network manifest), query (one literal, any engine, streaming answers),
rewrite (query rewriting over a schema), bench (query campaign with a
CSV report), check (graph diagnostics), oracle-diff (three-engine
differential run).

Exit codes: 0 success, 1 failed diagnostic/differences found, 2 usage
error, 3 input error, 4 resource cap exceeded, 5 protocol violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import benchgen, ontology
from .clauses import Clause, Literal
from .deca import ask
from .errors import InputError, ProtocolError, ResourceCapError
from .graph import (
    check_path_property,
    load_network,
    save_network,
    target_consistency_violations,
)
from .recursive import rcf
from .saturation import SaturationLimits, minimize, proper_prime_implicates
from .transport import ScheduleConfig

EXIT_DIAGNOSTIC = 1
EXIT_INPUT = 3
EXIT_RESOURCE = 4
EXIT_PROTOCOL = 5


def _schedule_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="scheduler seed")
    p.add_argument(
        "--policy",
        choices=("random", "per-pair-fifo", "lifo"),
        default="random",
        help="message delivery policy",
    )
    p.add_argument(
        "--timeout-ms",
        type=float,
        default=None,
        help="time-to-live budget per reasoning branch (default: none)",
    )
    p.add_argument(
        "--cost-model",
        choices=("unit", "wallclock"),
        default="unit",
        help="handler cost charged against the TTL",
    )


def _limits_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-clauses", type=int, default=1_000_000)
    p.add_argument("--saturation-budget-s", type=float, default=None)


def _schedule(args) -> ScheduleConfig:
    return ScheduleConfig(
        seed=args.seed,
        policy=args.policy,
        ttl_budget_ms=args.timeout_ms,
        cost_model=args.cost_model,
    )


def _limits(args) -> SaturationLimits:
    return SaturationLimits(args.max_clauses, args.saturation_budget_s)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peercf",
        description="Peer-to-peer propositional consequence finding toolkit.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_gen = sub.add_parser("gen", help="generate a benchmark network")
    p_gen.add_argument("--np", type=int, required=True, dest="np_peers")
    p_gen.add_argument("--k", type=int, required=True)
    p_gen.add_argument("--pr", type=float, default=0.1)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--m", type=int, required=True)
    p_gen.add_argument("--t", type=int, required=True)
    p_gen.add_argument("--q", type=int, required=True)
    p_gen.add_argument("--pct3cnf", type=float, default=0.0)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("-o", "--out", required=True, help="output directory")

    p_enc = sub.add_parser("encode", help="encode an ontology schema into a manifest")
    p_enc.add_argument("schema", help="schema file")
    p_enc.add_argument("-o", "--out", required=True, help="output directory")

    p_query = sub.add_parser("query", help="stream the consequences of one literal")
    p_query.add_argument("--manifest", required=True)
    p_query.add_argument("--engine", choices=("deca", "recursive", "oracle"), default="deca")
    p_query.add_argument("--peer", required=True)
    p_query.add_argument("--literal", required=True, help="e.g. Far or -Far")
    p_query.add_argument("--minimize", action="store_true")
    p_query.add_argument("--trace", default=None, help="write a message trace to this file")
    _schedule_args(p_query)
    _limits_args(p_query)

    p_rw = sub.add_parser("rewrite", help="conjunctive rewritings of a class query")
    p_rw.add_argument("schema", help="schema file")
    p_rw.add_argument("--query", required=True, help="class description")
    p_rw.add_argument("--peer", required=True)
    p_rw.add_argument("--engine", choices=("deca", "recursive", "oracle"), default="recursive")
    p_rw.add_argument("--all-candidates", action="store_true", help="skip maximality/properness filters")
    _schedule_args(p_rw)
    _limits_args(p_rw)

    p_bench = sub.add_parser("bench", help="run a random-query campaign")
    p_bench.add_argument("--manifest", required=True)
    p_bench.add_argument("--queries", type=int, required=True)
    p_bench.add_argument("--report", required=True, help="per-query CSV output")
    _schedule_args(p_bench)
    _limits_args(p_bench)

    p_check = sub.add_parser("check", help="path-property and target diagnostics")
    p_check.add_argument("--manifest", required=True)

    p_diff = sub.add_parser("oracle-diff", help="compare all three engines on one query")
    p_diff.add_argument("--manifest", required=True)
    p_diff.add_argument("--peer", required=True)
    p_diff.add_argument("--literal", required=True)
    _schedule_args(p_diff)
    _limits_args(p_diff)

    return parser


def _cmd_gen(args) -> int:
    params = benchgen.GenParams(
        np_peers=args.np_peers,
        k=args.k,
        pr=args.pr,
        n=args.n,
        m=args.m,
        t=args.t,
        q=args.q,
        pct3cnf=args.pct3cnf,
        seed=args.seed,
    )
    instance = benchgen.gen_instance(params)
    save_network(instance.graph, args.out)
    meta = {
        "params": {k: v for k, v in vars(args).items() if k not in ("verb", "out")},
        "peers": len(instance.graph.peers),
        "edges_labelled": len(instance.graph.edges),
        "target_adjustments": instance.target_adjustments,
    }
    with open(os.path.join(args.out, "params.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {args.out}/manifest.txt ({len(instance.graph.peers)} peers)")
    return 0


def _cmd_encode(args) -> int:
    with open(args.schema, "r", encoding="utf-8") as fh:
        schema = ontology.parse_schema(fh.read())
    g = ontology.prop_encode_schema(schema)
    save_network(g, args.out)
    report = check_path_property(g)
    print(f"wrote {args.out}/manifest.txt ({len(g.peers)} peers, path property: {report.holds})")
    return 0


def _cmd_query(args) -> int:
    g = load_network(args.manifest)
    q = Literal.parse(args.literal)
    limits = _limits(args)
    if args.engine == "oracle":
        answers = proper_prime_implicates(q, g.union_theory(), limits)
        targets = g.target_variables()
        answers = {c for c in answers if all(l.variable in targets for l in c)}
        for c in sorted(answers, key=Clause.sort_key):
            print(c)
        print("FINAL")
        return 0
    if args.engine == "recursive":
        answers = rcf(q, args.peer, g, limits)
        out = minimize(answers) if args.minimize else answers
        for c in sorted(out, key=Clause.sort_key):
            print(c)
        print("FINAL")
        return 0
    trace_fh = open(args.trace, "w", encoding="utf-8") if args.trace else None
    try:
        result = ask(
            g,
            args.peer,
            q,
            schedule=_schedule(args),
            limits=limits,
            on_answer=lambda c, t: None if args.minimize else print(c, flush=True),
            trace_file=trace_fh,
        )
    finally:
        if trace_fh:
            trace_fh.close()
    if args.minimize:
        for c in sorted(result.minimized(), key=Clause.sort_key):
            print(c)
    if result.final_received:
        print("FINAL")
    else:
        print("TIMEOUT")
    return 0


def _cmd_rewrite(args) -> int:
    with open(args.schema, "r", encoding="utf-8") as fh:
        schema = ontology.parse_schema(fh.read())
    query = ontology.parse_description(args.query)
    owners = {v.peer_qualifier for v in query.atoms()}
    if owners != {args.peer}:
        raise InputError(f"query classes {sorted(owners)} do not match --peer {args.peer}")
    found = ontology.rewritings(
        query,
        schema,
        engine=args.engine,
        maximal=not args.all_candidates,
        schedule=_schedule(args),
        limits=_limits(args),
    )
    for rw in sorted(found, key=str):
        print(rw)
    print(f"{len(found)} rewriting(s)")
    return 0


def _cmd_bench(args) -> int:
    g = load_network(args.manifest)
    campaign = benchgen.run_campaign(
        g,
        queries=args.queries,
        ttl_ms=args.timeout_ms,
        seed=args.seed,
        policy=args.policy,
        cost_model=args.cost_model,
        limits=_limits(args),
    )
    benchgen.write_report_csv(campaign, args.report)
    base, _ = os.path.splitext(args.report)
    benchgen.write_cdf_csv(campaign.depth_cdf(), base + "_depth_cdf.csv", "depth")
    benchgen.write_cdf_csv(campaign.width_cdf(), base + "_width_cdf.csv", "width")
    for key, value in campaign.summary().items():
        print(f"{key}: {value}")
    return 0


def _cmd_check(args) -> int:
    g = load_network(args.manifest, validate=False)
    report = check_path_property(g)
    target_bad = target_consistency_violations(g)
    for v, a, b in report.witnesses:
        print(f"path-property violation: {v} shared by {a} and {b} without a {v}-path")
    for v, a, b in target_bad:
        print(f"target inconsistency: {v} on edge {a}-{b}")
    if report.holds and not target_bad:
        print("OK")
        return 0
    return EXIT_DIAGNOSTIC


def _cmd_oracle_diff(args) -> int:
    g = load_network(args.manifest)
    q = Literal.parse(args.literal)
    limits = _limits(args)
    deca_set = minimize(
        ask(g, args.peer, q, schedule=_schedule(args), limits=limits).answers
    )
    recursive_set = minimize(rcf(q, args.peer, g, limits))
    oracle_all = proper_prime_implicates(q, g.union_theory(), limits)
    targets = g.target_variables()
    oracle_set = minimize(
        c for c in oracle_all if all(l.variable in targets for l in c)
    )
    sets = {"deca": deca_set, "recursive": recursive_set, "oracle": oracle_set}
    clean = True
    for a, b in (("deca", "recursive"), ("deca", "oracle"), ("recursive", "oracle")):
        only_a = sets[a] - sets[b]
        only_b = sets[b] - sets[a]
        if only_a or only_b:
            clean = False
            print(f"{a} vs {b}: +{sorted(map(str, only_a))} -{sorted(map(str, only_b))}")
    if clean:
        print(f"engines agree: {len(deca_set)} minimized answer(s)")
        return 0
    return EXIT_DIAGNOSTIC


_COMMANDS = {
    "gen": _cmd_gen,
    "encode": _cmd_encode,
    "query": _cmd_query,
    "rewrite": _cmd_rewrite,
    "bench": _cmd_bench,
    "check": _cmd_check,
    "oracle-diff": _cmd_oracle_diff,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.verb](args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ProtocolError as exc:
        print(f"protocol violation: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL


if __name__ == "__main__":
    sys.exit(main())
