"""Command line entry points.

Exit codes are part of the contract:
  0  success (plan accepted, graph conforms, bench completed)
  1  governed rejection, validation violations, or escaped violations in a
     full-engine suite run
  2  usage or input errors (bad flags, unparseable files, missing reference)
  3  internal faults (soundness failures, unexpected exceptions)
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .actions import parse_plan
from .agents import FixedPlanAgent
from .engine import EngineConfig, Intent, export_audit, govern
from .errors import GspecError, ParseError, SoundnessError
from .nkg import load_topology, save_topology
from .policy import load_policies, policy_stats, validate
from .scaling import DEFAULT_REPS, DEFAULT_SIZES, run_scaling
from .scenarios import default_counts, generate_scenarios
from .suite import AblationFlags, build_mock_agent, run_suite
from .topology import TopologySpec, generate_topology, ghost_pool

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _policy_path(override: str | None) -> str:
    if override:
        return override
    env_dir = os.environ.get("GSPEC_POLICY_DIR")
    if env_dir:
        return str(Path(env_dir) / "policies.json")
    return str(Path(__file__).parent / "data" / "policies.json")


def _emit(args, document: dict, text_lines) -> None:
    if args.json:
        print(json.dumps(document, indent=2))
    else:
        for line in text_lines:
            print(line)


def cmd_topo_gen(args) -> int:
    spec = TopologySpec(
        n_nodes=args.nodes, edge_factor=args.edge_factor, seed=args.seed
    )
    graph = generate_topology(spec)
    save_topology(graph, args.out)
    doc = {
        "path": args.out,
        "nodes": graph.node_count,
        "edges": graph.edge_count,
        "retired": len(ghost_pool(graph)),
        "seed": args.seed,
    }
    _emit(
        args,
        doc,
        [
            f"wrote {doc['nodes']} nodes / {doc['edges']} edges to {args.out} "
            f"({doc['retired']} retired)"
        ],
    )
    return EXIT_OK


def cmd_validate(args) -> int:
    graph = load_topology(args.graph)
    policy_set = load_policies(_policy_path(args.policies), hierarchy=graph.hierarchy)
    reference = load_topology(args.reference) if args.reference else None
    now = args.now if args.now is not None else graph.clock
    report = validate(graph, policy_set, now, reference=reference)
    doc = {
        "conforms": report.conforms,
        "policies": policy_stats(policy_set),
        "report": report.to_document(),
    }
    lines = (
        ["conforms"]
        if report.conforms
        else [
            f"{v.shape_id} {v.focus_node}: {v.message} [{v.detail}]"
            for v in report.violations
        ]
    )
    _emit(args, doc, lines)
    return EXIT_OK if report.conforms else EXIT_REJECTED


def cmd_govern(args) -> int:
    graph = load_topology(args.graph)
    policy_set = load_policies(_policy_path(args.policies), hierarchy=graph.hierarchy)
    with open(args.plan, "r", encoding="utf-8") as handle:
        try:
            plan_doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{args.plan}: invalid JSON: {exc.msg}") from None
    plan = parse_plan(plan_doc)
    entities = tuple(part for part in args.entities.split(",") if part)
    params = {}
    if args.params:
        try:
            params = json.loads(args.params)
        except json.JSONDecodeError as exc:
            raise ParseError(f"--params: invalid JSON: {exc.msg}") from None
        if not isinstance(params, dict):
            raise ParseError("--params must be a JSON object")
    intent = Intent(goal=args.goal, entities=entities, params=params)
    now = args.now if args.now is not None else graph.clock
    verdict, graph, records = govern(
        intent, graph, policy_set, FixedPlanAgent(plan), EngineConfig(), now=now
    )
    if args.audit:
        export_audit(records, args.audit, verdict=verdict)
    if args.out and verdict.accepted:
        save_topology(graph, args.out)
    doc = verdict.to_document()
    if verdict.accepted:
        lines = [f"ACCEPTED ({len(records)} actions committed)"]
    else:
        where = (
            f" at action {verdict.failed_action_index}"
            if verdict.failed_action_index is not None
            else ""
        )
        lines = [f"REJECTED {verdict.kind}{where}: {verdict.reason}"]
    _emit(args, doc, lines)
    return EXIT_OK if verdict.accepted else EXIT_REJECTED


def cmd_suite(args) -> int:
    spec = TopologySpec(n_nodes=args.nodes, seed=args.seed)
    graph = generate_topology(spec)
    policy_set = load_policies(_policy_path(args.policies), hierarchy=graph.hierarchy)
    scenarios = generate_scenarios(default_counts(args.scenarios), graph, args.seed)
    agent = build_mock_agent(
        graph, ghost_prob=args.ghost_prob, onto_prob=args.onto_prob, seed=args.seed
    )
    ablations = args.ablate or []
    flags = AblationFlags.from_names(ablations)
    metrics = run_suite(graph, scenarios, agent, policy_set, flags)
    doc = metrics.to_document()
    doc["ablations"] = sorted(set(ablations))
    lines = [f"{key}: {value}" for key, value in doc.items()]
    _emit(args, doc, lines)
    full_engine = not ablations
    if full_engine and metrics.escaped_violations > 0:
        return EXIT_REJECTED
    return EXIT_OK


def cmd_bench_scale(args) -> int:
    sizes = (
        [int(part) for part in args.sizes.split(",") if part]
        if args.sizes
        else list(DEFAULT_SIZES)
    )
    result = run_scaling(sizes, reps=args.reps, seed=args.seed)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as handle:
            handle.write(result.to_csv())
    doc = result.to_document()
    lines = [
        f"n={row['n']} m={row['m']} k={row['medianK']:g} "
        f"latencyMs={row['medianValidationMs']}"
        for row in doc["rows"]
    ]
    lines.append(
        f"fit: latency ~ {doc['coefficient']} * k^{doc['fittedExponent']}"
    )
    _emit(args, doc, lines)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gspec",
        description="Governed remediation for network knowledge graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    topo = sub.add_parser("topo-gen", help="generate a synthetic topology")
    topo.add_argument("--nodes", type=int, required=True)
    topo.add_argument("--edge-factor", type=float, default=2.67)
    topo.add_argument("--seed", type=int, default=0)
    topo.add_argument("--out", required=True)
    topo.add_argument("--json", action="store_true")
    topo.set_defaults(func=cmd_topo_gen)

    val = sub.add_parser("validate", help="validate a topology against policies")
    val.add_argument("--graph", required=True)
    val.add_argument("--policies")
    val.add_argument("--reference", help="baseline topology for change-bound checks")
    val.add_argument("--now", type=int)
    val.add_argument("--json", action="store_true")
    val.set_defaults(func=cmd_validate)

    gov = sub.add_parser("govern", help="run one plan through the engine")
    gov.add_argument("--graph", required=True)
    gov.add_argument("--plan", required=True)
    gov.add_argument("--goal", required=True)
    gov.add_argument("--entities", required=True, help="comma-separated node ids")
    gov.add_argument("--params", help="JSON object with goal parameters")
    gov.add_argument("--policies")
    gov.add_argument("--audit", help="append JSONL audit records here")
    gov.add_argument("--out", help="write the committed topology here on acceptance")
    gov.add_argument("--now", type=int)
    gov.add_argument("--json", action="store_true")
    gov.set_defaults(func=cmd_govern)

    suite = sub.add_parser("suite", help="run a governed remediation suite")
    suite.add_argument("--nodes", type=int, default=450)
    suite.add_argument("--scenarios", type=int, default=500)
    suite.add_argument("--seed", type=int, default=0)
    suite.add_argument("--ghost-prob", type=float, default=0.08)
    suite.add_argument("--onto-prob", type=float, default=0.17)
    suite.add_argument(
        "--ablate",
        action="append",
        choices=["nkg", "shacl", "tslam"],
        help="disable a layer; repeatable",
    )
    suite.add_argument("--policies")
    suite.add_argument("--json", action="store_true")
    suite.set_defaults(func=cmd_suite)

    bench = sub.add_parser("bench-scale", help="measure k and latency across sizes")
    bench.add_argument("--sizes", help="comma-separated node counts")
    bench.add_argument("--reps", type=int, default=DEFAULT_REPS)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--csv", help="write per-size rows here")
    bench.add_argument("--json", action="store_true")
    bench.set_defaults(func=cmd_bench_scale)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SoundnessError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (GspecError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # never let a crash masquerade as a verdict
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
