"""Sequential remediation suite: faults, governed plans, and bookkeeping.

The suite drives one committed graph lineage through a scenario list. Every
scenario advances the telemetry clock by one heartbeat, refreshes every
live node except a scenario's designated stale region, inflicts the fault,
and hands the intent to the engine. Verdicts feed the run counters;
accepted commits are re-audited against the pre-plan state to count any
violations that escaped the gates.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

from .actions import action_from_dict
from .agents import MockAgent, MockAgentConfig, NaiveRestartAgent
from .engine import (
    KIND_AGENT_FAILURE,
    KIND_HALLUCINATION,
    KIND_POLICY,
    KIND_STALE,
    EngineConfig,
    govern,
)
from .errors import InvalidSpec
from .nkg import Graph
from .policy import PolicySet, ValidationReport, validate
from .scenarios import Scenario, apply_fault, cleared
from .topology import ghost_pool

HEARTBEAT_INTERVAL = 30

_ABLATION_NAMES = ("nkg", "shacl", "tslam")


@dataclass(frozen=True, slots=True)
class AblationFlags:
    """Which engine layers to knock out for an ablation run."""

    membership_gate: bool = True
    policy_validation: bool = True
    degraded_agent: bool = False

    @classmethod
    def from_names(cls, names) -> "AblationFlags":
        chosen = set(names)
        unknown = chosen - set(_ABLATION_NAMES)
        if unknown:
            raise InvalidSpec(f"unknown ablation names: {sorted(unknown)}")
        return cls(
            membership_gate="nkg" not in chosen,
            policy_validation="shacl" not in chosen,
            degraded_agent="tslam" in chosen,
        )


@dataclass(slots=True)
class RunMetrics:
    total: int = 0
    remediated: int = 0
    accepted_not_remediated: int = 0
    rejected_policy: int = 0
    rejected_hallucination: int = 0
    rejected_stale: int = 0
    rejected_agent_failure: int = 0
    escaped_violations: int = 0
    injected_ghosts: int = 0
    injected_ontological: int = 0
    detected_ghosts: int = 0
    ghost_commits: int = 0
    agent_ms: list[float] = field(default_factory=list)
    validation_ms: list[float] = field(default_factory=list)

    @property
    def accepted(self) -> int:
        return self.remediated + self.accepted_not_remediated

    @property
    def rejected(self) -> int:
        return (
            self.rejected_policy
            + self.rejected_hallucination
            + self.rejected_stale
            + self.rejected_agent_failure
        )

    @property
    def consistent(self) -> bool:
        return self.total == self.accepted + self.rejected

    def to_document(self) -> dict:
        def med(values: list[float]) -> float:
            return round(statistics.median(values), 3) if values else 0.0

        return {
            "total": self.total,
            "remediated": self.remediated,
            "acceptedNotRemediated": self.accepted_not_remediated,
            "rejectedPolicy": self.rejected_policy,
            "rejectedHallucination": self.rejected_hallucination,
            "rejectedStale": self.rejected_stale,
            "rejectedAgentFailure": self.rejected_agent_failure,
            "escapedViolations": self.escaped_violations,
            "injectedGhosts": self.injected_ghosts,
            "injectedOntological": self.injected_ontological,
            "detectedGhosts": self.detected_ghosts,
            "ghostCommits": self.ghost_commits,
            "agentMsMedian": med(self.agent_ms),
            "validationMsMedian": med(self.validation_ms),
        }


def build_mock_agent(
    topology: Graph,
    ghost_prob: float = 0.08,
    onto_prob: float = 0.17,
    seed: int = 0,
) -> MockAgent:
    """Mock planner wired to a topology's retired-node pool."""
    return MockAgent(
        config=MockAgentConfig(ghost_prob=ghost_prob, onto_prob=onto_prob, seed=seed),
        ghost_pool=ghost_pool(topology),
        hierarchy=topology.hierarchy,
    )


def _nontemporal_ids(report: ValidationReport) -> set[tuple[str, str, str]]:
    return {
        (v.shape_id, v.focus_node, v.detail)
        for v in report.violations
        if v.family != "temporal"
    }


def run_suite(
    topology: Graph,
    scenarios: list[Scenario],
    agent,
    policy_set: PolicySet,
    flags: AblationFlags | None = None,
    heartbeat_interval: int = HEARTBEAT_INTERVAL,
) -> RunMetrics:
    flags = flags if flags is not None else AblationFlags()
    graph = topology.snapshot()
    effective_agent = NaiveRestartAgent() if flags.degraded_agent else agent
    config = EngineConfig(
        membership_gate=flags.membership_gate,
        policy_validation=flags.policy_validation,
        post_commit_check=False,
        congruence_check=True,
    )
    metrics = RunMetrics(total=len(scenarios))
    base_clock = graph.clock
    log_start = (
        len(effective_agent.injection_log)
        if isinstance(effective_agent, MockAgent)
        else 0
    )

    for index, scenario in enumerate(scenarios):
        now = base_clock + heartbeat_interval * (index + 1)
        skip = set(scenario.stale_region)
        for node_id in graph.node_ids():
            if node_id not in skip and graph.contains_active(node_id):
                graph.touch(node_id, now)
        graph.clock = now
        apply_fault(graph, scenario, now)

        pre = graph.snapshot()
        verdict, graph, records = govern(
            scenario.intent, graph, policy_set, effective_agent, config, now=now
        )
        metrics.agent_ms.append(verdict.agent_ms)
        metrics.validation_ms.append(verdict.validation_ms)

        if verdict.accepted:
            if cleared(graph, scenario):
                metrics.remediated += 1
            else:
                metrics.accepted_not_remediated += 1
            # Post-commit audit: anything newly violating relative to the
            # pre-plan state slipped through the gates, as did any committed
            # action aimed at a node outside the active view.
            post_report = validate(graph, policy_set, now, reference=pre)
            pre_report = validate(pre, policy_set, now, reference=pre)
            new_ids = _nontemporal_ids(post_report) - _nontemporal_ids(pre_report)
            metrics.escaped_violations += len(new_ids)
            for record in records:
                action = action_from_dict(record.action)
                if any(not pre.contains_active(t) for t in action.targets()):
                    metrics.ghost_commits += 1
                    metrics.escaped_violations += 1
        elif verdict.kind == KIND_HALLUCINATION:
            metrics.rejected_hallucination += 1
            metrics.detected_ghosts += 1
        elif verdict.kind == KIND_STALE:
            metrics.rejected_stale += 1
        elif verdict.kind == KIND_AGENT_FAILURE:
            metrics.rejected_agent_failure += 1
        elif verdict.kind == KIND_POLICY:
            metrics.rejected_policy += 1

    if isinstance(effective_agent, MockAgent):
        tail = effective_agent.injection_log[log_start:]
        metrics.injected_ghosts = sum(1 for _, kind in tail if kind == "ghost")
        metrics.injected_ontological = sum(
            1 for _, kind in tail if kind == "ontological"
        )
    return metrics
