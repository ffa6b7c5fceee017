"""Planning agents used by the harness and the CLI.

All agents speak the same contract: given the subgraph around the intent's
entities and the intent itself, return a Plan. The safe agent is a runbook
dispatcher keyed on the intent goal; the mock agent wraps it and injects
faulty actions at a configured rate to exercise the governance gates.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .actions import (
    Action,
    AddEdge,
    MigrateTraffic,
    Plan,
    RerouteTraffic,
    RestartFunction,
    ScaleSlice,
    SetAttribute,
    SetStatus,
    TraceStep,
)
from .corpus import IFACE_BANS
from .engine import AgentInterface, Intent
from .errors import AgentFailure, InvalidSpec
from .nkg import ClassHierarchy, NodeStatus, Subgraph

GOAL_RELIEVE_UPF = "relieve-upf-congestion"
GOAL_RESTORE_PATH = "restore-transport-path"
GOAL_REBALANCE_SLICE = "rebalance-slice-capacity"
GOAL_RESTORE_STATUS = "restore-node-status"

# Ceiling the rebalance planner steers under; keeps the scaled capacity
# inside the governed [0, 200] range even after repeated rebalances.
_CAPACITY_HEADROOM = 195.0


def _step(observation: str, diagnosis: str, plan: str) -> TraceStep:
    return TraceStep(observation=observation, diagnosis=diagnosis, plan=plan)


class FixedPlanAgent(AgentInterface):
    """Always proposes the same plan; backs the CLI plan-file route."""

    def __init__(self, plan: Plan) -> None:
        self._plan = plan

    def plan(self, subgraph: Subgraph, intent: Intent) -> Plan:
        return self._plan


class ScriptedAgent(AgentInterface):
    """Replays a fixed sequence of plans, one per call."""

    def __init__(self, plans, repeat_last: bool = False) -> None:
        self._plans = list(plans)
        self._repeat_last = repeat_last
        self._cursor = 0

    def plan(self, subgraph: Subgraph, intent: Intent) -> Plan:
        if self._cursor >= len(self._plans):
            if self._repeat_last and self._plans:
                return self._plans[-1]
            raise AgentFailure("scripted agent has no plan left")
        plan = self._plans[self._cursor]
        self._cursor += 1
        return plan


class FailingAgent(AgentInterface):
    """Planner that is down; every call raises."""

    def plan(self, subgraph: Subgraph, intent: Intent) -> Plan:
        raise RuntimeError("planner offline")


class SafeRemediationAgent(AgentInterface):
    """Runbook planner: deterministic, conforming remediations per goal."""

    def plan(self, subgraph: Subgraph, intent: Intent) -> Plan:
        goal = intent.goal
        if goal == GOAL_RELIEVE_UPF:
            actions, trace = self._relieve_upf(intent)
        elif goal == GOAL_RESTORE_PATH:
            actions, trace = self._restore_path(intent)
        elif goal == GOAL_REBALANCE_SLICE:
            actions, trace = self._rebalance_slice(subgraph, intent)
        elif goal == GOAL_RESTORE_STATUS:
            actions, trace = self._restore_status(intent)
        else:
            raise AgentFailure(f"no runbook for goal {goal!r}")
        return Plan(intent=goal, actions=tuple(actions), trace=tuple(trace))

    def _relieve_upf(self, intent: Intent):
        upf = intent.entities[0]
        alternate = intent.params.get("alternate")
        if not alternate:
            raise AgentFailure("congestion runbook needs an alternate target")
        actions = [
            MigrateTraffic(from_node=upf, to_node=alternate),
            SetAttribute(node=upf, attribute="sessionLoad", value=40.0),
        ]
        trace = [
            _step(
                f"{upf} reports elevated session load",
                "load must move before the function saturates",
                f"re-home slice attachments onto {alternate}",
            ),
            _step(
                f"{upf} still carries residual sessions",
                "remaining load fits the drained target level",
                "record the drained session load",
            ),
        ]
        return actions, trace

    def _restore_path(self, intent: Intent):
        slice_id = intent.params.get("slice")
        if not slice_id:
            raise AgentFailure("reroute runbook needs the impacted slice")
        old_path = tuple(intent.params["oldPath"])
        new_path = tuple(intent.params["newPath"])
        actions = [
            RerouteTraffic(slice=slice_id, old_path=old_path, new_path=new_path)
        ]
        trace = [
            _step(
                f"transport leg {old_path[0]}->{old_path[-1]} is down",
                f"service on {slice_id} needs an alternate leg",
                "reroute over " + "->".join(new_path),
            )
        ]
        return actions, trace

    def _rebalance_slice(self, subgraph: Subgraph, intent: Intent):
        slice_id = intent.entities[0]
        factor = float(intent.params.get("factor", 1.15))
        record = subgraph.records.get(slice_id)
        if record is not None:
            planned = record.attributes.get("plannedCapacity")
            if isinstance(planned, (int, float)) and planned > 0:
                factor = min(factor, _CAPACITY_HEADROOM / planned)
        actions = [
            ScaleSlice(slice=slice_id, attribute="plannedCapacity", value=factor),
            SetAttribute(node=slice_id, attribute="latencyMs", value=8.0),
        ]
        trace = [
            _step(
                f"{slice_id} is breaching its latency target",
                "capacity uplift keeps the change inside the allowed band",
                f"scale plannedCapacity by {factor:.3f}",
            ),
            _step(
                f"{slice_id} capacity uplift applied",
                "latency should settle at the engineered level",
                "record the restored latency",
            ),
        ]
        return actions, trace

    def _restore_status(self, intent: Intent):
        node = intent.entities[0]
        actions = [SetStatus(node=node, status=NodeStatus.ACTIVE)]
        trace = [
            _step(
                f"{node} drifted out of its expected lifecycle state",
                "the function is healthy; the recorded state is wrong",
                f"set {node} back to ACTIVE",
            )
        ]
        return actions, trace


class NaiveRestartAgent(AgentInterface):
    """Degraded planner: restarts the first entity no matter the goal."""

    def plan(self, subgraph: Subgraph, intent: Intent) -> Plan:
        node = intent.entities[0]
        return Plan(
            intent=intent.goal,
            actions=(RestartFunction(node=node),),
            trace=(
                _step(
                    f"{node} is implicated in the fault",
                    "a restart usually clears transient faults",
                    f"restart {node}",
                ),
            ),
        )


@dataclass(frozen=True, slots=True)
class MockAgentConfig:
    ghost_prob: float = 0.08
    onto_prob: float = 0.17
    seed: int = 0

    def __post_init__(self) -> None:
        for name, prob in (("ghost_prob", self.ghost_prob), ("onto_prob", self.onto_prob)):
            if not 0.0 <= prob <= 1.0:
                raise InvalidSpec(f"{name} must be within [0, 1]")
        if self.ghost_prob + self.onto_prob > 1.0:
            raise InvalidSpec("injection probabilities must not sum past 1")


class MockAgent(AgentInterface):
    """Wraps a safe planner and injects faulty actions at a configured rate.

    Injections are mutually exclusive per call and always land at plan
    index 0. A ghost injection re-homes traffic onto a retired node the
    planner believes is still live; an ontological injection wires a link
    the interface model forbids. The injection log records what was
    injected on which call so a harness can reconcile detection counts.
    """

    def __init__(
        self,
        config: MockAgentConfig | None = None,
        ghost_pool: tuple[str, ...] = (),
        hierarchy: ClassHierarchy | None = None,
        inner: AgentInterface | None = None,
    ) -> None:
        self.config = config if config is not None else MockAgentConfig()
        self.ghost_pool = tuple(sorted(ghost_pool))
        self.hierarchy = hierarchy if hierarchy is not None else ClassHierarchy()
        self.inner = inner if inner is not None else SafeRemediationAgent()
        self.call_index = 0
        self.injection_log: list[tuple[int, str]] = []

    @property
    def injected_ghosts(self) -> int:
        return sum(1 for _, kind in self.injection_log if kind == "ghost")

    @property
    def injected_ontological(self) -> int:
        return sum(1 for _, kind in self.injection_log if kind == "ontological")

    def plan(self, subgraph: Subgraph, intent: Intent) -> Plan:
        self.call_index += 1
        rng = random.Random(self.config.seed * 1_000_003 + self.call_index)
        base = self.inner.plan(subgraph, intent)
        draw = rng.random()
        injected: tuple[str, Action, TraceStep] | None = None
        if draw < self.config.ghost_prob:
            injected = self._ghost_action(subgraph, rng)
        elif draw < self.config.ghost_prob + self.config.onto_prob:
            injected = self._onto_action(subgraph, rng)
        if injected is None:
            return base
        kind, action, step = injected
        self.injection_log.append((self.call_index, kind))
        trace = (step, *base.trace) if base.trace else ()
        return Plan(intent=base.intent, actions=(action, *base.actions), trace=trace)

    def _ghost_action(self, subgraph: Subgraph, rng: random.Random):
        if not self.ghost_pool:
            return None
        ghost = rng.choice(self.ghost_pool)
        # Prefer a node that actually carries slice attachments.
        carriers = sorted(
            {edge.dst for edge in subgraph.edges if edge.iface == "s-nssai-config"}
        )
        source = rng.choice(carriers) if carriers else subgraph.node_ids[0]
        action = MigrateTraffic(from_node=source, to_node=ghost)
        step = _step(
            f"{ghost} shows spare capacity",
            f"shifting attachments off {source} should relieve pressure",
            f"re-home slice attachments onto {ghost}",
        )
        return ("ghost", action, step)

    def _onto_action(self, subgraph: Subgraph, rng: random.Random):
        if len(subgraph.node_ids) < 2:
            return None
        is_a = self.hierarchy.is_a
        amfs = sorted(
            nid for nid, rec in subgraph.records.items() if is_a(rec.nf_class, "AMFFunction")
        )
        upfs = sorted(
            nid for nid, rec in subgraph.records.items() if is_a(rec.nf_class, "UPFFunction")
        )
        if amfs and upfs:
            action = AddEdge(src=rng.choice(amfs), dst=rng.choice(upfs), iface="N3")
        else:
            action = self._fallback_banned_edge(subgraph)
            if action is None:
                return None
        step = _step(
            f"{action.src} lacks a direct path to {action.dst}",
            "a shortcut link would cut forwarding latency",
            f"wire {action.src} to {action.dst} over {action.iface}",
        )
        return ("ontological", action, step)

    def _fallback_banned_edge(self, subgraph: Subgraph) -> AddEdge | None:
        for nid in subgraph.node_ids:
            nf_class = subgraph.records[nid].nf_class
            for cls, banned in IFACE_BANS.items():
                if self.hierarchy.is_a(nf_class, cls) and banned:
                    peer = next(p for p in subgraph.node_ids if p != nid)
                    return AddEdge(src=nid, dst=peer, iface=banned[0])
        return None
