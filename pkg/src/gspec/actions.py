"""Typed graph mutations proposed by agents, and their simulation semantics.

Simulation is total by design: an action referencing a node that is not in the
store mutates nothing and leaves a no-op marker on the graph. Whether such a
reference is acceptable is the engine's call, not the action layer's.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar

from .errors import ParseError, UnknownActionKind, UnknownStatus
from .nkg import INTERFACES, Graph, NodeStatus

SLICE_IFACE = "s-nssai-config"
REROUTE_IFACE = "transportLink"

SCALABLE_ATTRIBUTES = ("plannedCapacity", "allocatedBandwidth")


@dataclass(frozen=True, slots=True)
class AddEdge:
    kind: ClassVar[str] = "AddEdge"
    src: str
    dst: str
    iface: str

    def targets(self) -> tuple[str, ...]:
        return _dedup((self.src, self.dst))


@dataclass(frozen=True, slots=True)
class RemoveEdge:
    kind: ClassVar[str] = "RemoveEdge"
    src: str
    dst: str
    iface: str

    def targets(self) -> tuple[str, ...]:
        return _dedup((self.src, self.dst))


@dataclass(frozen=True, slots=True)
class SetAttribute:
    kind: ClassVar[str] = "SetAttribute"
    node: str
    attribute: str
    value: float

    def targets(self) -> tuple[str, ...]:
        return (self.node,)


@dataclass(frozen=True, slots=True)
class SetStatus:
    kind: ClassVar[str] = "SetStatus"
    node: str
    status: NodeStatus

    def __post_init__(self) -> None:
        # Accept the enum or its string value; anything else is rejected on
        # construction rather than when the plan reaches the graph.
        try:
            object.__setattr__(self, "status", NodeStatus(self.status))
        except ValueError:
            raise UnknownStatus(f"SetStatus: unknown status {self.status!r}") from None

    def targets(self) -> tuple[str, ...]:
        return (self.node,)


@dataclass(frozen=True, slots=True)
class RerouteTraffic:
    """Replace the transport legs along old_path with legs along new_path."""

    kind: ClassVar[str] = "RerouteTraffic"
    slice: str
    old_path: tuple[str, ...]
    new_path: tuple[str, ...]

    def targets(self) -> tuple[str, ...]:
        return _dedup((self.slice,) + tuple(self.old_path) + tuple(self.new_path))


@dataclass(frozen=True, slots=True)
class ScaleSlice:
    """Multiply a capacity attribute by value (1.1 means +10%)."""

    kind: ClassVar[str] = "ScaleSlice"
    slice: str
    attribute: str
    value: float

    def targets(self) -> tuple[str, ...]:
        return (self.slice,)


@dataclass(frozen=True, slots=True)
class RestartFunction:
    """Cycle a function through STANDBY back to ACTIVE. The restart clears
    plannedCapacity to 0 until the function is reconfigured, which is what
    makes careless restarts visible to the blast-radius policy."""

    kind: ClassVar[str] = "RestartFunction"
    node: str

    def targets(self) -> tuple[str, ...]:
        return (self.node,)


@dataclass(frozen=True, slots=True)
class MigrateTraffic:
    """Re-home every slice-membership edge from from_node onto to_node."""

    kind: ClassVar[str] = "MigrateTraffic"
    from_node: str
    to_node: str

    def targets(self) -> tuple[str, ...]:
        return _dedup((self.from_node, self.to_node))


@dataclass(frozen=True, slots=True)
class DecommissionNode:
    kind: ClassVar[str] = "DecommissionNode"
    node: str

    def targets(self) -> tuple[str, ...]:
        return (self.node,)


Action = (
    AddEdge
    | RemoveEdge
    | SetAttribute
    | SetStatus
    | RerouteTraffic
    | ScaleSlice
    | RestartFunction
    | MigrateTraffic
    | DecommissionNode
)

ACTION_KINDS = {
    cls.kind: cls
    for cls in (
        AddEdge,
        RemoveEdge,
        SetAttribute,
        SetStatus,
        RerouteTraffic,
        ScaleSlice,
        RestartFunction,
        MigrateTraffic,
        DecommissionNode,
    )
}


def _dedup(ids) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for node_id in ids:
        seen.setdefault(node_id)
    return tuple(seen)


@dataclass(frozen=True, slots=True)
class TraceStep:
    observation: str = ""
    diagnosis: str = ""
    plan: str = ""

    def to_dict(self) -> dict[str, str]:
        return {"observation": self.observation, "diagnosis": self.diagnosis, "plan": self.plan}


@dataclass(frozen=True)
class Plan:
    """An ordered action sequence with the agent's reasoning trace.

    The trace has one step per action, or none at all.
    """

    intent: str
    actions: tuple[Action, ...]
    trace: tuple[TraceStep, ...] = field(default=())

    def trace_step(self, index: int) -> TraceStep | None:
        if self.trace and 0 <= index < len(self.trace):
            return self.trace[index]
        return None


# ---- Simulation ----


def apply_action(graph: Graph, action: Action) -> tuple[str, ...]:
    """Mutate the graph per the action; returns the ids whose state changed.

    Every touched node gets lastUpdated stamped with the graph clock: state
    written through governance counts as fresh telemetry about those nodes.
    """
    clock = graph.clock
    missing = [t for t in action.targets() if not graph.has_node(t)]
    if missing:
        graph.noop_markers.append(f"{action.kind}: missing {', '.join(missing)}")
        return ()

    touched: tuple[str, ...]
    if isinstance(action, AddEdge):
        graph.add_edge(action.src, action.dst, action.iface, clock)
        touched = action.targets()
    elif isinstance(action, RemoveEdge):
        removed = graph.remove_edges(action.src, action.dst, action.iface)
        if removed == 0:
            graph.noop_markers.append(
                f"RemoveEdge: no {action.iface} edge {action.src}->{action.dst}"
            )
        touched = action.targets()
    elif isinstance(action, SetAttribute):
        graph.set_attribute(action.node, action.attribute, action.value, clock)
        touched = (action.node,)
    elif isinstance(action, SetStatus):
        graph.set_status(action.node, action.status, clock)
        touched = (action.node,)
    elif isinstance(action, RerouteTraffic):
        for src, dst in zip(action.old_path, action.old_path[1:]):
            graph.remove_edges(src, dst, REROUTE_IFACE)
        for src, dst in zip(action.new_path, action.new_path[1:]):
            graph.add_edge(src, dst, REROUTE_IFACE, clock)
        touched = action.targets()
    elif isinstance(action, ScaleSlice):
        record = graph.get_node(action.slice)
        current = record.attributes.get(action.attribute)
        if current is None:
            graph.noop_markers.append(
                f"ScaleSlice: {action.slice} has no {action.attribute}"
            )
            return ()
        graph.set_attribute(action.slice, action.attribute, current * action.value, clock)
        touched = (action.slice,)
    elif isinstance(action, RestartFunction):
        graph.set_status(action.node, NodeStatus.STANDBY, clock)
        graph.set_status(action.node, NodeStatus.ACTIVE, clock)
        if "plannedCapacity" in graph.get_node(action.node).attributes:
            graph.set_attribute(action.node, "plannedCapacity", 0.0, clock)
        touched = (action.node,)
    elif isinstance(action, MigrateTraffic):
        moved: list[str] = []
        for edge in list(graph.in_edges(action.from_node)):
            if edge.iface == SLICE_IFACE:
                graph.remove_edges(edge.src, action.from_node, SLICE_IFACE)
                graph.add_edge(edge.src, action.to_node, SLICE_IFACE, clock)
                moved.append(edge.src)
        for edge in list(graph.out_edges(action.from_node)):
            if edge.iface == SLICE_IFACE:
                graph.remove_edges(action.from_node, edge.dst, SLICE_IFACE)
                graph.add_edge(action.to_node, edge.dst, SLICE_IFACE, clock)
                moved.append(edge.dst)
        touched = _dedup((action.from_node, action.to_node, *moved))
    else:
        graph.decommission_node(action.node, clock)
        touched = (action.node,)

    for node_id in touched:
        graph.touch(node_id, clock)
    return touched


def simulate_action(graph: Graph, action: Action) -> Graph:
    """Spec-level entry point: apply and hand the same graph back."""
    apply_action(graph, action)
    return graph


# ---- Plan parsing and serialization ----


def _require_str(entry: dict, key: str, where: str) -> str:
    value = entry.get(key)
    if not isinstance(value, str) or not value:
        raise ParseError(f"{where}: missing {key}")
    return value


def _require_finite(entry: dict, key: str, where: str) -> float:
    value = entry.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise ParseError(f"{where}: {key} must be a finite number")
    return float(value)


def _require_path(entry: dict, key: str, where: str) -> tuple[str, ...]:
    value = entry.get(key)
    if not isinstance(value, list) or len(value) < 2:
        raise ParseError(f"{where}: {key} must list at least two nodes")
    if not all(isinstance(v, str) and v for v in value):
        raise ParseError(f"{where}: {key} entries must be node ids")
    return tuple(value)


def action_from_dict(entry: dict, where: str = "action") -> Action:
    if not isinstance(entry, dict):
        raise ParseError(f"{where}: must be an object")
    kind = entry.get("kind")
    if kind not in ACTION_KINDS:
        raise UnknownActionKind(f"{where}: unknown action kind {kind!r}")
    if kind in ("AddEdge", "RemoveEdge"):
        iface = _require_str(entry, "iface", where)
        if iface not in INTERFACES:
            raise ParseError(f"{where}: unknown interface {iface!r}")
        cls = ACTION_KINDS[kind]
        return cls(src=_require_str(entry, "src", where), dst=_require_str(entry, "dst", where), iface=iface)
    if kind == "SetAttribute":
        return SetAttribute(
            node=_require_str(entry, "node", where),
            attribute=_require_str(entry, "attribute", where),
            value=_require_finite(entry, "value", where),
        )
    if kind == "SetStatus":
        raw = entry.get("status")
        try:
            status = NodeStatus(raw)
        except ValueError:
            raise UnknownStatus(f"{where}: unknown status {raw!r}") from None
        return SetStatus(node=_require_str(entry, "node", where), status=status)
    if kind == "RerouteTraffic":
        return RerouteTraffic(
            slice=_require_str(entry, "slice", where),
            old_path=_require_path(entry, "oldPath", where),
            new_path=_require_path(entry, "newPath", where),
        )
    if kind == "ScaleSlice":
        attribute = _require_str(entry, "attribute", where)
        if attribute not in SCALABLE_ATTRIBUTES:
            raise ParseError(f"{where}: ScaleSlice cannot scale {attribute!r}")
        return ScaleSlice(
            slice=_require_str(entry, "slice", where),
            attribute=attribute,
            value=_require_finite(entry, "value", where),
        )
    if kind == "MigrateTraffic":
        return MigrateTraffic(
            from_node=_require_str(entry, "fromNode", where),
            to_node=_require_str(entry, "toNode", where),
        )
    # RestartFunction and DecommissionNode share the single-node form.
    return ACTION_KINDS[kind](node=_require_str(entry, "node", where))


def action_to_dict(action: Action) -> dict:
    if isinstance(action, (AddEdge, RemoveEdge)):
        return {"kind": action.kind, "src": action.src, "dst": action.dst, "iface": action.iface}
    if isinstance(action, SetAttribute):
        return {
            "kind": action.kind,
            "node": action.node,
            "attribute": action.attribute,
            "value": action.value,
        }
    if isinstance(action, SetStatus):
        return {"kind": action.kind, "node": action.node, "status": action.status.value}
    if isinstance(action, RerouteTraffic):
        return {
            "kind": action.kind,
            "slice": action.slice,
            "oldPath": list(action.old_path),
            "newPath": list(action.new_path),
        }
    if isinstance(action, ScaleSlice):
        return {
            "kind": action.kind,
            "slice": action.slice,
            "attribute": action.attribute,
            "value": action.value,
        }
    if isinstance(action, MigrateTraffic):
        return {"kind": action.kind, "fromNode": action.from_node, "toNode": action.to_node}
    return {"kind": action.kind, "node": action.node}


def parse_plan(doc: dict) -> Plan:
    if not isinstance(doc, dict):
        raise ParseError("plan document must be a JSON object")
    intent = doc.get("intent", "")
    if not isinstance(intent, str):
        raise ParseError("plan intent must be a string")
    raw_actions = doc.get("actions")
    if not isinstance(raw_actions, list) or not raw_actions:
        raise ParseError("plan must list at least one action")
    actions = tuple(
        action_from_dict(entry, where=f"actions[{i}]") for i, entry in enumerate(raw_actions)
    )
    raw_trace = doc.get("trace", [])
    if not isinstance(raw_trace, list):
        raise ParseError("plan trace must be a list of steps")
    steps = []
    for i, entry in enumerate(raw_trace):
        if not isinstance(entry, dict):
            raise ParseError(f"trace[{i}]: must be an object")
        steps.append(
            TraceStep(
                observation=str(entry.get("observation", "")),
                diagnosis=str(entry.get("diagnosis", "")),
                plan=str(entry.get("plan", "")),
            )
        )
    trace = tuple(steps)
    if trace and len(trace) != len(actions):
        raise ParseError("trace must have one step per action or be empty")
    return Plan(intent=intent, actions=actions, trace=trace)


def plan_to_document(plan: Plan) -> dict:
    return {
        "intent": plan.intent,
        "trace": [step.to_dict() for step in plan.trace],
        "actions": [action_to_dict(action) for action in plan.actions],
    }
