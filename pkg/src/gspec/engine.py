"""Governance control plane.

A plan is judged in three phases: a pluggable agent plans against a local
subgraph; every action is gated and simulated on a snapshot with scoped
validation after each step; only a fully clean plan is applied to the
committed graph, one audit record per action.

Rejection never mutates committed state: phase 2 runs entirely on the
snapshot, so atomicity is structural rather than relying on rollback.
"""

from __future__ import annotations

import json
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

from .actions import Action, Plan, action_from_dict, action_to_dict, apply_action
from .errors import SoundnessError
from .nkg import Graph, Subgraph
from .policy import PolicySet, ValidationReport, validate

OUTCOME_ACCEPTED = "ACCEPTED"
OUTCOME_REJECTED = "REJECTED"

KIND_POLICY = "PolicyViolation"
KIND_HALLUCINATION = "Hallucination"
KIND_STALE = "StaleState"
KIND_AGENT_FAILURE = "AgentFailure"


@dataclass(frozen=True, slots=True)
class Intent:
    """Structured operator intent: a goal name, the entity ids it concerns,
    and any goal-specific parameters the planner needs."""

    goal: str
    entities: tuple[str, ...]
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"goal": self.goal, "entities": list(self.entities), "params": self.params}

    @classmethod
    def from_dict(cls, doc: dict) -> "Intent":
        return cls(
            goal=str(doc.get("goal", "")),
            entities=tuple(doc.get("entities", [])),
            params=dict(doc.get("params", {})),
        )


@dataclass(frozen=True, slots=True)
class EngineConfig:
    hops: int = 2
    freshness_max_age: int = 15
    delta_theta: float = 20.0
    mediation_depth: int = 4
    membership_gate: bool = True
    policy_validation: bool = True
    post_commit_check: bool = True
    congruence_check: bool = True


@dataclass(frozen=True)
class Verdict:
    outcome: str
    kind: str | None = None
    reason: str = ""
    failed_action_index: int | None = None
    report: ValidationReport | None = None
    validation_ms: float = 0.0
    agent_ms: float = 0.0
    subgraph_k: int = 0
    ts: int = 0
    intent: dict = field(default_factory=dict)
    post_commit_report: ValidationReport | None = None

    @property
    def accepted(self) -> bool:
        return self.outcome == OUTCOME_ACCEPTED

    def to_document(self) -> dict:
        doc = {
            "outcome": self.outcome,
            "kind": self.kind,
            "reason": self.reason,
            "failedActionIndex": self.failed_action_index,
            "validationMs": round(self.validation_ms, 3),
            "agentMs": round(self.agent_ms, 3),
            "subgraphK": self.subgraph_k,
        }
        if self.report is not None:
            doc["report"] = self.report.to_document()
        return doc


@dataclass(frozen=True, slots=True)
class AuditRecord:
    sequence: int
    timestamp: int
    intent: dict
    action_index: int
    action: dict
    trace_step: dict
    pre_hash: str
    post_hash: str
    verdict_ref: str = ""

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "seq": self.sequence,
                "ts": self.timestamp,
                "intent": self.intent,
                "actionIndex": self.action_index,
                "action": self.action,
                "trace": self.trace_step,
                "preHash": self.pre_hash,
                "postHash": self.post_hash,
            }
        )


class AgentInterface(ABC):
    """Layer that proposes plans; must be deterministic for a fixed seed."""

    @abstractmethod
    def plan(self, subgraph: Subgraph, intent: Intent) -> Plan:
        raise NotImplementedError


def _impact_scope(graph: Graph, touched, targets, depth: int) -> set[str]:
    """Nodes whose shape verdicts an action can change.

    Everything the action touched or named, plus the active-view ball of
    radius `depth` around it. Adjacency effects live 1 hop out and a bounded
    mediation path through a changed element keeps its focus inside the
    ball, so validating this scope sees every violation the action can add.
    """
    seeds: dict[str, None] = {}
    for node_id in (*touched, *targets):
        if graph.has_node(node_id):
            seeds.setdefault(node_id)
    if not seeds:
        return set()
    sub = graph.extract_subgraph(tuple(seeds), depth, use_cache=False)
    return set(sub.node_ids) | set(seeds)


def _classify(report: ValidationReport) -> tuple[str, str]:
    if all(v.family == "temporal" for v in report.violations):
        return KIND_STALE, report.violations[0].message
    # Lead with a non-temporal violation so the reason names the real defect.
    for violation in report.violations:
        if violation.family != "temporal":
            return KIND_POLICY, violation.message
    return KIND_POLICY, report.violations[0].message


def verify(
    action: Action,
    graph: Graph,
    policy_set: PolicySet,
    now: int,
    reference: Graph | None = None,
    config: EngineConfig | None = None,
) -> Verdict:
    """Judge one action against a simulation snapshot, mutating it.

    Membership is checked on the active view as it stands before the action
    runs, so an action can never legitimize its own target.
    """
    cfg = config if config is not None else EngineConfig()
    if cfg.membership_gate:
        for target in action.targets():
            if not graph.contains_active(target):
                return Verdict(
                    outcome=OUTCOME_REJECTED,
                    kind=KIND_HALLUCINATION,
                    reason=f"target {target!r} is not in the active graph",
                    failed_action_index=0,
                    ts=now,
                )
    touched = apply_action(graph, action)
    if not cfg.policy_validation:
        return Verdict(outcome=OUTCOME_ACCEPTED, ts=now)
    depth = max(cfg.mediation_depth, policy_set.max_path_depth)
    scope = _impact_scope(graph, touched, action.targets(), depth)
    started = time.perf_counter()
    report = validate(graph, policy_set, now, reference=reference, scope=scope)
    elapsed = (time.perf_counter() - started) * 1000.0
    if report.conforms:
        return Verdict(outcome=OUTCOME_ACCEPTED, report=report, validation_ms=elapsed, ts=now)
    kind, reason = _classify(report)
    return Verdict(
        outcome=OUTCOME_REJECTED,
        kind=kind,
        reason=reason,
        failed_action_index=0,
        report=report,
        validation_ms=elapsed,
        ts=now,
    )


def govern(
    intent: Intent,
    graph: Graph,
    policy_set: PolicySet,
    agent: AgentInterface,
    config: EngineConfig | None = None,
    now: int | None = None,
) -> tuple[Verdict, Graph, list[AuditRecord]]:
    """Run the full three-phase loop against the committed graph.

    Returns the verdict, the (possibly updated) committed graph, and the
    audit records written during execution (empty on rejection).
    """
    cfg = config if config is not None else EngineConfig()
    if now is None:
        now = graph.clock
    intent_doc = intent.to_dict()

    # Phase 1: plan against the local context only.
    subgraph = graph.extract_subgraph(intent.entities, cfg.hops)
    started = time.perf_counter()
    try:
        plan = agent.plan(subgraph, intent)
    except Exception as exc:
        agent_ms = (time.perf_counter() - started) * 1000.0
        verdict = Verdict(
            outcome=OUTCOME_REJECTED,
            kind=KIND_AGENT_FAILURE,
            reason=f"agent failed: {exc}",
            agent_ms=agent_ms,
            subgraph_k=subgraph.k,
            ts=now,
            intent=intent_doc,
        )
        return verdict, graph, []
    agent_ms = (time.perf_counter() - started) * 1000.0
    if not plan.actions:
        verdict = Verdict(
            outcome=OUTCOME_REJECTED,
            kind=KIND_AGENT_FAILURE,
            reason="agent produced an empty plan",
            agent_ms=agent_ms,
            subgraph_k=subgraph.k,
            ts=now,
            intent=intent_doc,
        )
        return verdict, graph, []

    # Phase 2: gate, simulate and validate each action on the snapshot.
    # State written through governance is stamped with the decision time, so
    # the simulation clock is aligned with `now` (and replay can reproduce it).
    reference = graph.snapshot()
    sim = graph.snapshot()
    sim.clock = max(sim.clock, now)
    depth = max(cfg.mediation_depth, policy_set.max_path_depth)
    validation_ms = 0.0
    for index, action in enumerate(plan.actions):
        if cfg.membership_gate:
            ghost = next(
                (t for t in action.targets() if not sim.contains_active(t)), None
            )
            if ghost is not None:
                verdict = Verdict(
                    outcome=OUTCOME_REJECTED,
                    kind=KIND_HALLUCINATION,
                    reason=f"target {ghost!r} is not in the active graph",
                    failed_action_index=index,
                    validation_ms=validation_ms,
                    agent_ms=agent_ms,
                    subgraph_k=subgraph.k,
                    ts=now,
                    intent=intent_doc,
                )
                return verdict, graph, []
        touched = apply_action(sim, action)
        if cfg.policy_validation:
            scope = _impact_scope(sim, touched, action.targets(), depth)
            started = time.perf_counter()
            report = validate(sim, policy_set, now, reference=reference, scope=scope)
            validation_ms += (time.perf_counter() - started) * 1000.0
            if not report.conforms:
                kind, reason = _classify(report)
                verdict = Verdict(
                    outcome=OUTCOME_REJECTED,
                    kind=kind,
                    reason=reason,
                    failed_action_index=index,
                    report=report,
                    validation_ms=validation_ms,
                    agent_ms=agent_ms,
                    subgraph_k=subgraph.k,
                    ts=now,
                    intent=intent_doc,
                )
                return verdict, graph, []
    final_sim_hash = sim.graph_hash()

    # Phase 3: apply the verified plan to the committed graph.
    graph.clock = max(graph.clock, now)
    records: list[AuditRecord] = []
    for index, action in enumerate(plan.actions):
        pre_hash = graph.graph_hash()
        apply_action(graph, action)
        post_hash = graph.graph_hash()
        step = plan.trace_step(index)
        records.append(
            AuditRecord(
                sequence=index,
                timestamp=now,
                intent=intent_doc,
                action_index=index,
                action=action_to_dict(action),
                trace_step=step.to_dict() if step is not None else {},
                pre_hash=pre_hash,
                post_hash=post_hash,
                verdict_ref=f"{intent.goal}@{now}",
            )
        )
    if cfg.congruence_check and graph.graph_hash() != final_sim_hash:
        raise SoundnessError(
            "committed graph diverged from the verified simulation state"
        )
    post_commit_report = None
    if cfg.post_commit_check:
        post_commit_report = validate(graph, policy_set, now, reference=reference)

    verdict = Verdict(
        outcome=OUTCOME_ACCEPTED,
        validation_ms=validation_ms,
        agent_ms=agent_ms,
        subgraph_k=subgraph.k,
        ts=now,
        intent=intent_doc,
        post_commit_report=post_commit_report,
    )
    return verdict, graph, records


# ---- Audit trail ----


def verdict_json_line(verdict: Verdict) -> str:
    return json.dumps(
        {
            "ts": verdict.ts,
            "intent": verdict.intent,
            "outcome": verdict.outcome,
            "kind": verdict.kind,
            "reason": verdict.reason,
            "failedActionIndex": verdict.failed_action_index,
        }
    )


def export_audit(records, sink, verdict: Verdict | None = None) -> None:
    """Append execution records as JSONL; a rejected verdict contributes a
    single verdict line instead of execution lines."""
    lines = [record.to_json_line() for record in records]
    if verdict is not None and not verdict.accepted:
        lines.append(verdict_json_line(verdict))
    payload = "".join(line + "\n" for line in lines)
    if hasattr(sink, "write"):
        sink.write(payload)
    else:
        with open(sink, "a", encoding="utf-8") as handle:
            handle.write(payload)


def replay_audit(graph: Graph, source) -> Graph:
    """Re-apply an audit trail to a graph, checking the hash chain.

    The graph must be in the exact state the trail started from. Verdict
    lines (rejections) are checked to carry no state change.
    """
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        with open(source, "r", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        entry = json.loads(line)
        if "seq" not in entry:
            continue  # verdict line: nothing was committed
        if graph.graph_hash() != entry["preHash"]:
            raise SoundnessError(f"audit line {number}: pre-state hash mismatch")
        graph.clock = max(graph.clock, int(entry["ts"]))
        action = action_from_dict(entry["action"], where=f"audit line {number}")
        apply_action(graph, action)
        if graph.graph_hash() != entry["postHash"]:
            raise SoundnessError(f"audit line {number}: post-state hash mismatch")
    return graph
