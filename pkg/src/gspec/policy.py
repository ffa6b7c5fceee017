"""Declarative constraint corpus and the validator that applies it.

A policy shape binds one constraint to a target class; class inheritance makes
a shape on an ancestor govern every descendant instance. Validation targets
the governed view (every non-decommissioned node), while adjacency and path
constraints inspect only the active view, mirroring what the rest of the
system considers live topology.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import (
    InvalidBounds,
    MissingReference,
    ParseError,
    UnknownClass,
    UnknownShape,
)
from .nkg import ACTIVE_STATUSES, INTERFACES, ClassHierarchy, Graph, NodeStatus

WILDCARD_IFACE = "*"

SEVERITY_VIOLATION = "VIOLATION"

DEFAULT_MEDIATION_DEPTH = 4


@dataclass(frozen=True, slots=True)
class ForbiddenAdjacency:
    """No active-view edge may join the focus to a peerClass node."""

    iface: str
    peer_class: str


@dataclass(frozen=True, slots=True)
class RequiredMediation:
    """Every active path from the focus to a peerClass node must pass a
    viaClass node; the search is bounded to max_depth edges."""

    peer_class: str
    via_class: str
    max_depth: int = DEFAULT_MEDIATION_DEPTH


@dataclass(frozen=True, slots=True)
class AttributeRange:
    attribute: str
    min_inclusive: float | None
    max_inclusive: float | None


@dataclass(frozen=True, slots=True)
class AttributeEnum:
    attribute: str
    allowed: frozenset[str]


@dataclass(frozen=True, slots=True)
class Freshness:
    max_age_seconds: int


@dataclass(frozen=True, slots=True)
class DeltaBound:
    """Bounds an attribute as a percentage of its value in a reference graph.

    Nodes absent from the reference, or without a positive reference value,
    are exempt: there is no baseline to compare against.
    """

    attribute: str
    min_percent: float
    max_percent: float


Constraint = (
    ForbiddenAdjacency | RequiredMediation | AttributeRange | AttributeEnum | Freshness | DeltaBound
)

_FAMILIES = {
    ForbiddenAdjacency: "topological",
    RequiredMediation: "topological",
    AttributeRange: "resource",
    AttributeEnum: "state",
    Freshness: "temporal",
    DeltaBound: "delta",
}

FAMILY_ORDER = ("topological", "resource", "state", "temporal", "delta")


@dataclass(frozen=True, slots=True)
class PolicyShape:
    id: str
    target_class: str
    constraint: Constraint
    message: str
    severity: str = SEVERITY_VIOLATION

    @property
    def family(self) -> str:
        return _FAMILIES[type(self.constraint)]


@dataclass(frozen=True, slots=True)
class Violation:
    shape_id: str
    focus_node: str
    message: str
    detail: str
    family: str

    def sort_key(self) -> tuple[str, str, str]:
        return (self.shape_id, self.focus_node, self.detail)


@dataclass(frozen=True, slots=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def conforms(self) -> bool:
        return not self.violations

    def to_document(self) -> dict:
        return {
            "conforms": self.conforms,
            "violations": [
                {
                    "shapeId": v.shape_id,
                    "focusNode": v.focus_node,
                    "message": v.message,
                    "detail": v.detail,
                    "family": v.family,
                }
                for v in self.violations
            ],
        }


class PolicySet:
    """Immutable, id-indexed collection of shapes."""

    def __init__(self, shapes) -> None:
        self.shapes: tuple[PolicyShape, ...] = tuple(shapes)
        self.by_id: dict[str, PolicyShape] = {}
        for shape in self.shapes:
            if shape.id in self.by_id:
                raise ParseError(f"duplicate shape id {shape.id!r}")
            self.by_id[shape.id] = shape

    def __len__(self) -> int:
        return len(self.shapes)

    def __iter__(self):
        return iter(self.shapes)

    def without(self, shape_id: str) -> "PolicySet":
        if shape_id not in self.by_id:
            raise UnknownShape(f"shape {shape_id!r} is not in the set")
        return PolicySet(s for s in self.shapes if s.id != shape_id)

    @property
    def max_path_depth(self) -> int:
        depths = [
            s.constraint.max_depth
            for s in self.shapes
            if isinstance(s.constraint, RequiredMediation)
        ]
        return max(depths, default=DEFAULT_MEDIATION_DEPTH)

    def has_delta_shapes(self) -> bool:
        return any(isinstance(s.constraint, DeltaBound) for s in self.shapes)


def policy_stats(policy_set: PolicySet) -> dict[str, int]:
    stats = {family: 0 for family in FAMILY_ORDER}
    for shape in policy_set:
        stats[shape.family] += 1
    stats["total"] = len(policy_set)
    return stats


# ---- Parsing ----


def _require_number(params: dict, key: str, where: str) -> float:
    value = params.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise ParseError(f"{where}: {key} must be a finite number")
    return float(value)


def _parse_constraint(kind: str, params: dict, where: str, hierarchy: ClassHierarchy) -> Constraint:
    if kind == "forbidden-adjacency":
        iface = params.get("iface", WILDCARD_IFACE)
        if iface != WILDCARD_IFACE and iface not in INTERFACES:
            raise ParseError(f"{where}: unknown interface {iface!r}")
        peer = params.get("peerClass")
        if not isinstance(peer, str) or not hierarchy.knows(peer):
            raise UnknownClass(f"{where}: unknown peerClass {peer!r}")
        return ForbiddenAdjacency(iface=iface, peer_class=peer)

    if kind == "required-mediation":
        peer, via = params.get("peerClass"), params.get("viaClass")
        for label, name in (("peerClass", peer), ("viaClass", via)):
            if not isinstance(name, str) or not hierarchy.knows(name):
                raise UnknownClass(f"{where}: unknown {label} {name!r}")
        depth = params.get("maxDepth", DEFAULT_MEDIATION_DEPTH)
        if not isinstance(depth, int) or depth < 1:
            raise InvalidBounds(f"{where}: maxDepth must be a positive integer")
        return RequiredMediation(peer_class=peer, via_class=via, max_depth=depth)

    if kind == "attribute-range":
        attribute = params.get("attribute")
        if not isinstance(attribute, str) or not attribute:
            raise ParseError(f"{where}: attribute name required")
        low = _require_number(params, "minInclusive", where) if "minInclusive" in params else None
        high = _require_number(params, "maxInclusive", where) if "maxInclusive" in params else None
        if low is None and high is None:
            raise InvalidBounds(f"{where}: at least one bound required")
        if low is not None and high is not None and low > high:
            raise InvalidBounds(f"{where}: empty interval [{low}, {high}]")
        return AttributeRange(attribute=attribute, min_inclusive=low, max_inclusive=high)

    if kind == "attribute-enum":
        attribute = params.get("attribute", "status")
        if attribute != "status":
            raise ParseError(f"{where}: attribute-enum supports only the status attribute")
        allowed = params.get("allowed")
        if not isinstance(allowed, list) or not allowed:
            raise InvalidBounds(f"{where}: allowed must be a non-empty list")
        valid = {s.value for s in NodeStatus}
        for status in allowed:
            if status not in valid:
                raise ParseError(f"{where}: unknown status {status!r}")
        return AttributeEnum(attribute="status", allowed=frozenset(allowed))

    if kind == "freshness":
        age = params.get("maxAgeSeconds")
        if not isinstance(age, int) or isinstance(age, bool) or age <= 0:
            raise InvalidBounds(f"{where}: maxAgeSeconds must be a positive integer")
        return Freshness(max_age_seconds=age)

    if kind == "delta-bound":
        attribute = params.get("attribute")
        if not isinstance(attribute, str) or not attribute:
            raise ParseError(f"{where}: attribute name required")
        low = _require_number(params, "minPercent", where)
        high = _require_number(params, "maxPercent", where)
        # A delta window must straddle 100% (no change) and stay positive.
        if not (0 < low < 100 < high):
            raise InvalidBounds(f"{where}: percent bounds must satisfy 0 < min < 100 < max")
        return DeltaBound(attribute=attribute, min_percent=low, max_percent=high)

    raise ParseError(f"{where}: unknown constraint kind {kind!r}")


def policies_from_document(doc: dict, hierarchy: ClassHierarchy | None = None) -> PolicySet:
    if hierarchy is None:
        hierarchy = ClassHierarchy()
    if not isinstance(doc, dict) or not isinstance(doc.get("shapes", []), list):
        raise ParseError("policy document must be an object with a 'shapes' list")
    shapes: list[PolicyShape] = []
    for index, entry in enumerate(doc.get("shapes", [])):
        shape_id = entry.get("id")
        if not isinstance(shape_id, str) or not shape_id:
            raise ParseError(f"shapes[{index}]: missing id")
        where = f"shape {shape_id!r}"
        target = entry.get("targetClass")
        if not isinstance(target, str) or not hierarchy.knows(target):
            raise UnknownClass(f"{where}: unknown targetClass {target!r}")
        kind = entry.get("kind")
        if not isinstance(kind, str):
            raise ParseError(f"{where}: missing kind")
        params = entry.get("params", {})
        if not isinstance(params, dict):
            raise ParseError(f"{where}: params must be an object")
        message = entry.get("message")
        if not isinstance(message, str) or not message:
            raise ParseError(f"{where}: missing message")
        severity = entry.get("severity", SEVERITY_VIOLATION)
        if severity != SEVERITY_VIOLATION:
            raise ParseError(f"{where}: unsupported severity {severity!r}")
        constraint = _parse_constraint(kind, params, where, hierarchy)
        shapes.append(
            PolicyShape(
                id=shape_id,
                target_class=target,
                constraint=constraint,
                message=message,
                severity=severity,
            )
        )
    return PolicySet(shapes)


def load_policies(source, hierarchy: ClassHierarchy | None = None) -> PolicySet:
    """Parse a policy document given as a dict or as a JSON file path."""
    if isinstance(source, dict):
        return policies_from_document(source, hierarchy)
    with open(source, "r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return policies_from_document(doc, hierarchy)


def shape_to_entry(shape: PolicyShape) -> dict:
    c = shape.constraint
    if isinstance(c, ForbiddenAdjacency):
        kind, params = "forbidden-adjacency", {"iface": c.iface, "peerClass": c.peer_class}
    elif isinstance(c, RequiredMediation):
        kind, params = "required-mediation", {
            "peerClass": c.peer_class,
            "viaClass": c.via_class,
            "maxDepth": c.max_depth,
        }
    elif isinstance(c, AttributeRange):
        kind, params = "attribute-range", {"attribute": c.attribute}
        if c.min_inclusive is not None:
            params["minInclusive"] = c.min_inclusive
        if c.max_inclusive is not None:
            params["maxInclusive"] = c.max_inclusive
    elif isinstance(c, AttributeEnum):
        kind, params = "attribute-enum", {"attribute": c.attribute, "allowed": sorted(c.allowed)}
    elif isinstance(c, Freshness):
        kind, params = "freshness", {"maxAgeSeconds": c.max_age_seconds}
    else:
        kind, params = "delta-bound", {
            "attribute": c.attribute,
            "minPercent": c.min_percent,
            "maxPercent": c.max_percent,
        }
    return {
        "id": shape.id,
        "targetClass": shape.target_class,
        "kind": kind,
        "params": params,
        "message": shape.message,
        "severity": shape.severity,
    }


def policies_to_document(policy_set: PolicySet) -> dict:
    return {"shapes": [shape_to_entry(s) for s in policy_set]}


# ---- Target resolution ----


def _governed_targets(graph: Graph, target_class: str) -> list[str]:
    nodes = graph._nodes
    return sorted(
        node_id
        for node_id in graph.instances_of(target_class)
        if nodes[node_id].status is not NodeStatus.DECOMMISSIONED
    )


def shape_targets(policy_set: PolicySet, graph: Graph, shape_id: str) -> tuple[str, ...]:
    """Governed-view instances of the shape's target class, ordered by id."""
    shape = policy_set.by_id.get(shape_id)
    if shape is None:
        raise UnknownShape(f"shape {shape_id!r} is not in the set")
    if not graph.hierarchy.knows(shape.target_class):
        raise UnknownClass(f"target class {shape.target_class!r} unknown to this graph")
    return tuple(_governed_targets(graph, shape.target_class))


# ---- Evaluation ----


def _eval_adjacency(graph: Graph, shape: PolicyShape, focus: str, out: list[Violation]) -> None:
    constraint: ForbiddenAdjacency = shape.constraint
    if not graph.contains_active(focus):
        return
    hierarchy = graph.hierarchy
    iface = constraint.iface
    peer_class = constraint.peer_class
    nodes = graph._nodes
    for edge in graph.out_edges(focus):
        if iface != WILDCARD_IFACE and edge.iface != iface:
            continue
        peer = nodes.get(edge.dst)
        if peer is None or peer.status not in ACTIVE_STATUSES:
            continue
        if peer_class in hierarchy.ancestors(peer.nf_class):
            out.append(
                Violation(
                    shape_id=shape.id,
                    focus_node=focus,
                    message=shape.message,
                    detail=f"{edge.src}-[{edge.iface}]->{edge.dst}",
                    family="topological",
                )
            )
    for edge in graph.in_edges(focus):
        if iface != WILDCARD_IFACE and edge.iface != iface:
            continue
        peer = nodes.get(edge.src)
        if peer is None or peer.status not in ACTIVE_STATUSES:
            continue
        if peer_class in hierarchy.ancestors(peer.nf_class):
            out.append(
                Violation(
                    shape_id=shape.id,
                    focus_node=focus,
                    message=shape.message,
                    detail=f"{edge.src}-[{edge.iface}]->{edge.dst}",
                    family="topological",
                )
            )


def _eval_mediation(graph: Graph, shape: PolicyShape, focus: str, out: list[Violation]) -> None:
    """Flag the focus when some directed active path of bounded length reaches
    a peer-class node without ever touching a via-class node.

    The witness detail is the lexicographically smallest of the shortest
    offending paths, so identical graphs always report identical details.
    """
    constraint: RequiredMediation = shape.constraint
    if not graph.contains_active(focus):
        return
    hierarchy = graph.hierarchy
    nodes = graph._nodes
    via, peer = constraint.via_class, constraint.peer_class

    admissible_cache: dict[str, tuple[bool, bool]] = {}

    def admissible(node_id: str) -> tuple[bool, bool]:
        """(may a path enter this node, does it count as an offending peer)."""
        cached = admissible_cache.get(node_id)
        if cached is not None:
            return cached
        record = nodes.get(node_id)
        if record is None or record.status not in ACTIVE_STATUSES:
            result = (False, False)
        else:
            ancestors = hierarchy.ancestors(record.nf_class)
            # Via-class nodes are never traversed, not even as endpoints.
            result = (via not in ancestors, peer in ancestors)
        admissible_cache[node_id] = result
        return result

    # Forward BFS: distance from the focus to the nearest offending peer.
    dist = {focus: 0}
    frontier = [focus]
    goal_depth = -1
    for depth in range(1, constraint.max_depth + 1):
        next_frontier: list[str] = []
        for current in frontier:
            for edge in graph.out_edges(current):
                nxt = edge.dst
                if nxt in dist:
                    continue
                enter, is_peer = admissible(nxt)
                if not enter:
                    continue
                dist[nxt] = depth
                if is_peer:
                    goal_depth = depth
                next_frontier.append(nxt)
        if goal_depth >= 0:
            break
        if not next_frontier:
            return
        frontier = next_frontier
    if goal_depth < 0:
        return

    # Reverse multi-source BFS from every offending peer: hops still needed
    # to finish an offending path from each node.
    remaining: dict[str, int] = {}
    rev_frontier: list[str] = []
    for node_id in nodes.keys():
        if node_id == focus:
            continue
        enter, is_peer = admissible(node_id)
        if enter and is_peer:
            remaining[node_id] = 0
            rev_frontier.append(node_id)
    for hops in range(1, goal_depth):
        nxt_rev: list[str] = []
        for current in rev_frontier:
            for edge in graph.in_edges(current):
                prev = edge.src
                if prev in remaining or prev == focus:
                    continue
                if admissible(prev)[0]:
                    remaining[prev] = hops
                    nxt_rev.append(prev)
        rev_frontier = nxt_rev

    # Greedy reconstruction: stepping to the smallest id that can still finish
    # in budget yields the lexicographically smallest shortest path.
    path = [focus]
    current = focus
    for step in range(goal_depth):
        budget = goal_depth - step - 1
        best: str | None = None
        for edge in graph.out_edges(current):
            nxt = edge.dst
            if remaining.get(nxt) == budget and (best is None or nxt < best):
                best = nxt
        if best is None:  # unreachable given goal_depth came from the same graph
            return
        path.append(best)
        current = best
    out.append(
        Violation(
            shape_id=shape.id,
            focus_node=focus,
            message=shape.message,
            detail="->".join(path),
            family="topological",
        )
    )


def _eval_range(graph: Graph, shape: PolicyShape, focus: str, out: list[Violation]) -> None:
    constraint: AttributeRange = shape.constraint
    record = graph._nodes[focus]
    value = record.attributes.get(constraint.attribute)
    if value is None:
        # Fail closed: a governed node missing the attribute is a violation.
        out.append(
            Violation(shape.id, focus, shape.message, f"attribute {constraint.attribute} absent", "resource")
        )
        return
    low, high = constraint.min_inclusive, constraint.max_inclusive
    if (low is not None and value < low) or (high is not None and value > high):
        out.append(
            Violation(
                shape.id,
                focus,
                shape.message,
                f"{constraint.attribute}={value!r} outside [{low}, {high}]",
                "resource",
            )
        )


def _eval_enum(graph: Graph, shape: PolicyShape, focus: str, out: list[Violation]) -> None:
    constraint: AttributeEnum = shape.constraint
    status = graph._nodes[focus].status.value
    if status not in constraint.allowed:
        out.append(Violation(shape.id, focus, shape.message, f"status={status}", "state"))


def _eval_freshness(
    graph: Graph, shape: PolicyShape, focus: str, now: int, out: list[Violation]
) -> None:
    constraint: Freshness = shape.constraint
    age = now - graph._nodes[focus].last_updated
    if age > constraint.max_age_seconds:
        out.append(
            Violation(
                shape.id,
                focus,
                shape.message,
                f"age={age}s exceeds {constraint.max_age_seconds}s",
                "temporal",
            )
        )


def _eval_delta(
    graph: Graph, shape: PolicyShape, focus: str, reference: Graph, out: list[Violation]
) -> None:
    constraint: DeltaBound = shape.constraint
    ref_record = reference._nodes.get(focus)
    if ref_record is None:
        return  # not in the reference: exempt
    ref_value = ref_record.attributes.get(constraint.attribute)
    if ref_value is None or ref_value <= 0:
        return  # no usable baseline: exempt
    value = graph._nodes[focus].attributes.get(constraint.attribute)
    if value is None:
        out.append(
            Violation(shape.id, focus, shape.message, f"attribute {constraint.attribute} absent", "delta")
        )
        return
    percent = 100.0 * value / ref_value
    if percent < constraint.min_percent or percent > constraint.max_percent:
        out.append(
            Violation(
                shape.id,
                focus,
                shape.message,
                f"{constraint.attribute}={percent:.1f}% of reference outside "
                f"[{constraint.min_percent}%, {constraint.max_percent}%]",
                "delta",
            )
        )


def validate(
    graph: Graph,
    policy_set: PolicySet,
    now: int,
    reference: Graph | None = None,
    scope=None,
) -> ValidationReport:
    """Evaluate every shape over its governed targets.

    `scope`, when given, restricts focus nodes to `scope ∩ targets`. Identical
    inputs always produce an identical, fully ordered report.
    """
    if reference is None and policy_set.has_delta_shapes():
        raise MissingReference("the policy set has delta shapes; a reference graph is required")

    hierarchy = graph.hierarchy
    nodes = graph._nodes
    scope_list: list[tuple[str, tuple[str, ...]]] | None = None
    if scope is not None:
        scope_list = []
        for node_id in sorted(set(scope)):
            record = nodes.get(node_id)
            if record is None or record.status is NodeStatus.DECOMMISSIONED:
                continue
            scope_list.append((node_id, hierarchy.ancestors(record.nf_class)))

    targets_by_class: dict[str, list[str]] = {}
    violations: list[Violation] = []
    for shape in policy_set:
        if scope_list is None:
            focuses = targets_by_class.get(shape.target_class)
            if focuses is None:
                focuses = _governed_targets(graph, shape.target_class)
                targets_by_class[shape.target_class] = focuses
        else:
            focuses = [nid for nid, ancestors in scope_list if shape.target_class in ancestors]

        constraint = shape.constraint
        if isinstance(constraint, ForbiddenAdjacency):
            for focus in focuses:
                _eval_adjacency(graph, shape, focus, violations)
        elif isinstance(constraint, RequiredMediation):
            for focus in focuses:
                _eval_mediation(graph, shape, focus, violations)
        elif isinstance(constraint, AttributeRange):
            for focus in focuses:
                _eval_range(graph, shape, focus, violations)
        elif isinstance(constraint, AttributeEnum):
            for focus in focuses:
                _eval_enum(graph, shape, focus, violations)
        elif isinstance(constraint, Freshness):
            for focus in focuses:
                _eval_freshness(graph, shape, focus, now, violations)
        else:
            for focus in focuses:
                _eval_delta(graph, shape, focus, reference, violations)

    # Parallel identical edges (or self loops) can produce the same finding
    # twice; the report is a set, so exact duplicates collapse.
    ordered = sorted(set(violations), key=Violation.sort_key)
    return ValidationReport(violations=tuple(ordered))
