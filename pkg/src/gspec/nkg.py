"""In-memory network knowledge graph store.

The graph is the deterministic ground truth that plans are simulated against.
It offers three views of its nodes:

* store view: every node ever added, including decommissioned ones;
* active view: nodes whose status is ACTIVE or STANDBY, the only view the
  membership gate and subgraph extraction consult;
* governed view: every non-decommissioned node, the set policy shapes target.

Snapshots use copy-on-write maps so that a simulation copy costs memory
proportional to what it touches, not to the graph size.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum

from .errors import (
    DuplicateId,
    ParseError,
    UnknownClass,
    UnknownEndpoint,
    UnknownInterface,
    UnknownNode,
    UnknownStatus,
)

# Interface vocabulary: control/user-plane reference points plus the
# transport, monitoring and slice-membership edge kinds.
INTERFACES = frozenset(
    {"N2", "N3", "N4", "N6", "N11", "transportLink", "measurementPoint", "s-nssai-config"}
)

ROOT_CLASS = "Top"

# (class, parent) pairs of the built-in hierarchy. NetworkSlice and
# TransportNode sit beside ManagedFunction, not under it.
DEFAULT_CLASSES = (
    ("ManagedFunction", ROOT_CLASS),
    ("AMFFunction", "ManagedFunction"),
    ("SMFFunction", "ManagedFunction"),
    ("UPFFunction", "ManagedFunction"),
    ("GnbFunction", "ManagedFunction"),
    ("NetworkSlice", ROOT_CLASS),
    ("TransportNode", ROOT_CLASS),
)


class NodeStatus(str, Enum):
    ACTIVE = "ACTIVE"
    STANDBY = "STANDBY"
    FAILED = "FAILED"
    DECOMMISSIONED = "DECOMMISSIONED"


# Statuses that count as present for the membership gate and the active view.
ACTIVE_STATUSES = frozenset({NodeStatus.ACTIVE, NodeStatus.STANDBY})


class ClassHierarchy:
    """Single-rooted class tree with vendor subclasses loaded at runtime."""

    def __init__(self) -> None:
        self._parent: dict[str, str | None] = {ROOT_CLASS: None}
        for name, parent in DEFAULT_CLASSES:
            self._parent[name] = parent
        self._ancestors: dict[str, tuple[str, ...]] = {}

    def add_class(self, name: str, parent: str) -> None:
        if name in self._parent:
            raise DuplicateId(f"class {name!r} is already declared")
        if parent not in self._parent:
            raise UnknownClass(f"parent class {parent!r} is not declared")
        self._parent[name] = parent
        self._ancestors.clear()

    def knows(self, name: str) -> bool:
        return name in self._parent

    def parent_of(self, name: str) -> str | None:
        if name not in self._parent:
            raise UnknownClass(f"class {name!r} is not declared")
        return self._parent[name]

    def ancestors(self, name: str) -> tuple[str, ...]:
        """The class itself followed by every ancestor up to the root."""
        cached = self._ancestors.get(name)
        if cached is not None:
            return cached
        if name not in self._parent:
            raise UnknownClass(f"class {name!r} is not declared")
        chain = []
        cursor: str | None = name
        while cursor is not None:
            chain.append(cursor)
            cursor = self._parent[cursor]
        result = tuple(chain)
        self._ancestors[name] = result
        return result

    def is_a(self, name: str, ancestor: str) -> bool:
        return ancestor in self.ancestors(name)

    def subtree(self, name: str) -> tuple[str, ...]:
        """The class and all declared descendants, lexicographically ordered."""
        if name not in self._parent:
            raise UnknownClass(f"class {name!r} is not declared")
        return tuple(sorted(c for c in self._parent if self.is_a(c, name)))

    def extra_classes(self) -> tuple[tuple[str, str], ...]:
        """Declared classes beyond the built-in set, as (name, parent) pairs."""
        builtin = {ROOT_CLASS} | {name for name, _ in DEFAULT_CLASSES}
        return tuple(
            (name, parent)
            for name, parent in sorted(self._parent.items())
            if name not in builtin and parent is not None
        )


@dataclass(frozen=True, slots=True)
class NodeRecord:
    """One graph node. Records are immutable; updates replace the record."""

    id: str
    nf_class: str
    status: NodeStatus
    attributes: dict[str, float]
    last_updated: int


@dataclass(frozen=True, slots=True)
class EdgeRecord:
    src: str
    dst: str
    iface: str
    timestamp: int

    def as_tuple(self) -> tuple[str, str, str, int]:
        return (self.src, self.dst, self.iface, self.timestamp)


@dataclass(frozen=True, slots=True)
class Subgraph:
    """BFS-ordered node ids plus the induced active-view edges.

    Agents plan against this object only; it carries the node records so a
    planner can inspect classes, statuses and attributes of its local context.
    """

    node_ids: tuple[str, ...]
    records: dict[str, NodeRecord]
    edges: tuple[EdgeRecord, ...]

    @property
    def k(self) -> int:
        return len(self.node_ids)

    def record(self, node_id: str) -> NodeRecord:
        return self.records[node_id]


class _CowMap:
    """Dict with O(1) forks through a shared immutable base layer.

    Values must be treated as immutable: every update rebinds the key.
    Keys are never deleted, which keeps iteration simple and cheap.
    """

    __slots__ = ("_base", "_delta")

    def __init__(self, base: dict | None = None) -> None:
        self._base = base if base is not None else {}
        self._delta: dict = {}

    def __getitem__(self, key):
        delta = self._delta
        if key in delta:
            return delta[key]
        return self._base[key]

    def get(self, key, default=None):
        delta = self._delta
        if key in delta:
            return delta[key]
        return self._base.get(key, default)

    def __setitem__(self, key, value) -> None:
        self._delta[key] = value

    def __contains__(self, key) -> bool:
        return key in self._delta or key in self._base

    def __len__(self) -> int:
        if not self._delta:
            return len(self._base)
        base = self._base
        return len(base) + sum(1 for k in self._delta if k not in base)

    def keys(self):
        base = self._base
        yield from base
        for key in self._delta:
            if key not in base:
                yield key

    def items(self):
        for key in self.keys():
            yield key, self[key]

    def fork(self) -> "_CowMap":
        # Consolidate local writes into a fresh shared base, then share it.
        if self._delta:
            self._base = {**self._base, **self._delta}
            self._delta = {}
        return _CowMap(self._base)

    def delta_items(self):
        return self._delta.items()


class Graph:
    """Mutable property graph with structural-sharing snapshots."""

    def __init__(self, hierarchy: ClassHierarchy | None = None, clock: int = 0) -> None:
        self.hierarchy = hierarchy if hierarchy is not None else ClassHierarchy()
        self.clock = clock
        self._nodes = _CowMap()
        self._out = _CowMap()
        self._in = _CowMap()
        self._direct_index: dict[str, set[str] | frozenset[str]] = {}
        self._index_frozen = False
        self._edge_count = 0
        self._version = 0
        self._ids_cache: tuple[str, ...] | None = None
        self._instance_cache: dict[str, frozenset[str]] = {}
        self._subgraph_cache: dict[tuple[frozenset[str], int], tuple[int, Subgraph]] = {}
        self._hash_cache: tuple[int, str] | None = None
        self.noop_markers: list[str] = []

    # ---- Store mutations ----

    def add_node(self, record: NodeRecord) -> None:
        if record.id in self._nodes:
            raise DuplicateId(f"node {record.id!r} already exists")
        if not self.hierarchy.knows(record.nf_class):
            raise UnknownClass(f"node {record.id!r} has unknown class {record.nf_class!r}")
        self._nodes[record.id] = record
        self._out[record.id] = ()
        self._in[record.id] = ()
        if self._index_frozen:
            current = self._direct_index.get(record.nf_class, frozenset())
            self._direct_index[record.nf_class] = frozenset(current) | {record.id}
        else:
            self._direct_index.setdefault(record.nf_class, set()).add(record.id)
        self._ids_cache = None
        self._instance_cache = {}
        self._touch_version()

    def add_edge(self, src: str, dst: str, iface: str, timestamp: int) -> None:
        if src not in self._nodes:
            raise UnknownEndpoint(f"edge source {src!r} is not in the store")
        if dst not in self._nodes:
            raise UnknownEndpoint(f"edge target {dst!r} is not in the store")
        if iface not in INTERFACES:
            raise UnknownInterface(f"interface {iface!r} is not in the vocabulary")
        edge = EdgeRecord(src, dst, iface, timestamp)
        self._out[src] = self._out[src] + (edge,)
        self._in[dst] = self._in[dst] + (edge,)
        self._edge_count += 1
        self._touch_version()

    def remove_edges(self, src: str, dst: str, iface: str) -> int:
        """Remove every (src, dst, iface) edge; returns how many were removed."""
        if src not in self._nodes or dst not in self._nodes:
            return 0
        old_out = self._out[src]
        kept = tuple(e for e in old_out if not (e.dst == dst and e.iface == iface))
        removed = len(old_out) - len(kept)
        if removed == 0:
            return 0
        self._out[src] = kept
        self._in[dst] = tuple(
            e for e in self._in[dst] if not (e.src == src and e.iface == iface)
        )
        self._edge_count -= removed
        self._touch_version()
        return removed

    def set_status(self, node_id: str, status: NodeStatus, timestamp: int) -> None:
        record = self._require(node_id)
        # Coerce here so a status that arrived as a plain string can never
        # poison downstream checks that compare enum members.
        try:
            coerced = NodeStatus(status)
        except ValueError:
            raise UnknownStatus(f"unknown status {status!r}") from None
        self._replace(record, status=coerced, timestamp=timestamp)

    def set_attribute(self, node_id: str, attribute: str, value: float, timestamp: int) -> None:
        record = self._require(node_id)
        attributes = dict(record.attributes)
        attributes[attribute] = value
        self._replace(record, attributes=attributes, timestamp=timestamp)

    def touch(self, node_id: str, timestamp: int) -> None:
        """Stamp a node's telemetry time without changing anything else."""
        record = self._require(node_id)
        self._replace(record, timestamp=timestamp)

    def decommission_node(self, node_id: str, timestamp: int) -> None:
        """Mark a node as retired. Idempotent; the node and its edges remain
        in the store but leave the active view."""
        record = self._require(node_id)
        if record.status is NodeStatus.DECOMMISSIONED:
            return
        self._replace(record, status=NodeStatus.DECOMMISSIONED, timestamp=timestamp)

    def _replace(
        self,
        record: NodeRecord,
        *,
        status: NodeStatus | None = None,
        attributes: dict[str, float] | None = None,
        timestamp: int,
    ) -> None:
        # lastUpdated is monotone per node regardless of caller-supplied time.
        self._nodes[record.id] = NodeRecord(
            id=record.id,
            nf_class=record.nf_class,
            status=status if status is not None else record.status,
            attributes=attributes if attributes is not None else record.attributes,
            last_updated=max(record.last_updated, timestamp),
        )
        self._touch_version()

    def _require(self, node_id: str) -> NodeRecord:
        record = self._nodes.get(node_id)
        if record is None:
            raise UnknownNode(f"node {node_id!r} is not in the store")
        return record

    def _touch_version(self) -> None:
        self._version += 1
        self._hash_cache = None

    # ---- Read side ----

    def has_node(self, node_id: str) -> bool:
        return node_id in self._nodes

    def get_node(self, node_id: str) -> NodeRecord:
        return self._require(node_id)

    def contains_active(self, node_id: str) -> bool:
        """The single membership oracle: present and ACTIVE or STANDBY."""
        record = self._nodes.get(node_id)
        return record is not None and record.status in ACTIVE_STATUSES

    def node_ids(self) -> tuple[str, ...]:
        if self._ids_cache is None:
            self._ids_cache = tuple(sorted(self._nodes.keys()))
        return self._ids_cache

    def records(self):
        for node_id in self.node_ids():
            yield self._nodes[node_id]

    def out_edges(self, node_id: str) -> tuple[EdgeRecord, ...]:
        return self._out.get(node_id, ())

    def in_edges(self, node_id: str) -> tuple[EdgeRecord, ...]:
        return self._in.get(node_id, ())

    def edges(self):
        for node_id in self.node_ids():
            yield from self._out.get(node_id, ())

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    def instances_of(self, nf_class: str) -> frozenset[str]:
        """Ids of every node whose class equals or descends from nf_class."""
        cached = self._instance_cache.get(nf_class)
        if cached is not None:
            return cached
        members: set[str] = set()
        for cls in self.hierarchy.subtree(nf_class):
            members.update(self._direct_index.get(cls, ()))
        result = frozenset(members)
        self._instance_cache[nf_class] = result
        return result

    def active_neighbors(self, node_id: str) -> set[str]:
        nodes = self._nodes
        found: set[str] = set()
        for edge in self._out.get(node_id, ()):
            record = nodes.get(edge.dst)
            if record is not None and record.status in ACTIVE_STATUSES:
                found.add(edge.dst)
        for edge in self._in.get(node_id, ()):
            record = nodes.get(edge.src)
            if record is not None and record.status in ACTIVE_STATUSES:
                found.add(edge.src)
        return found

    # ---- Subgraph extraction ----

    def extract_subgraph(self, seeds, hops: int, use_cache: bool = True) -> Subgraph:
        """Active-view nodes within `hops` of any seed, BFS-ordered.

        Ordering is by breadth level, lexicographic within a level, so the
        result is stable across runs. Results are memoized per (seed set,
        hops) until the next mutation.
        """
        seed_tuple = tuple(seeds)
        if not seed_tuple:
            raise ParseError("subgraph extraction needs at least one seed")
        for seed in seed_tuple:
            if seed not in self._nodes:
                raise UnknownNode(f"seed {seed!r} is not in the store")
        key = (frozenset(seed_tuple), hops)
        if use_cache:
            hit = self._subgraph_cache.get(key)
            if hit is not None and hit[0] == self._version:
                return hit[1]

        frontier = sorted({s for s in seed_tuple if self.contains_active(s)})
        visited = set(frontier)
        ordered: list[str] = list(frontier)
        for _ in range(hops):
            if not frontier:
                break
            reached: set[str] = set()
            for node_id in frontier:
                reached.update(self.active_neighbors(node_id))
            reached -= visited
            frontier = sorted(reached)
            visited.update(reached)
            ordered.extend(frontier)

        members = set(ordered)
        induced: list[EdgeRecord] = []
        for node_id in ordered:
            for edge in self._out.get(node_id, ()):
                if edge.dst in members:
                    induced.append(edge)
        induced.sort(key=EdgeRecord.as_tuple)
        subgraph = Subgraph(
            node_ids=tuple(ordered),
            records={node_id: self._nodes[node_id] for node_id in ordered},
            edges=tuple(induced),
        )
        if use_cache:
            self._subgraph_cache[key] = (self._version, subgraph)
        return subgraph

    # ---- Snapshots and hashing ----

    def snapshot(self) -> "Graph":
        """Logically independent copy sharing unchanged structure."""
        self._freeze_index()
        copy = Graph.__new__(Graph)
        copy.hierarchy = self.hierarchy
        copy.clock = self.clock
        copy._nodes = self._nodes.fork()
        copy._out = self._out.fork()
        copy._in = self._in.fork()
        copy._direct_index = self._direct_index
        copy._index_frozen = True
        copy._edge_count = self._edge_count
        copy._version = 0
        copy._ids_cache = self._ids_cache
        copy._instance_cache = {}
        copy._subgraph_cache = {}
        if self._hash_cache is not None and self._hash_cache[0] == self._version:
            copy._hash_cache = (0, self._hash_cache[1])
        else:
            copy._hash_cache = None
        copy.noop_markers = []
        return copy

    def _freeze_index(self) -> None:
        if not self._index_frozen:
            self._direct_index = {
                cls: frozenset(ids) for cls, ids in self._direct_index.items()
            }
            self._index_frozen = True

    def graph_hash(self) -> str:
        """Content hash over canonically ordered nodes, edges and attributes.

        Insertion order never matters; equal content yields equal digests.
        """
        if self._hash_cache is not None and self._hash_cache[0] == self._version:
            return self._hash_cache[1]
        digest = hashlib.sha256()
        nodes = self._nodes
        edge_tuples: list[tuple[str, str, str, int]] = []
        for node_id in self.node_ids():
            record = nodes[node_id]
            digest.update(
                repr(
                    (
                        record.id,
                        record.nf_class,
                        record.status.value,
                        tuple(sorted(record.attributes.items())),
                        record.last_updated,
                    )
                ).encode()
            )
            for edge in self._out.get(node_id, ()):
                edge_tuples.append(edge.as_tuple())
        edge_tuples.sort()
        for item in edge_tuples:
            digest.update(repr(item).encode())
        result = digest.hexdigest()
        self._hash_cache = (self._version, result)
        return result

    def delta_size_bytes(self) -> int:
        """Serialized size of this copy's local overlay; the marginal memory
        a simulation retains on top of its parent graph."""
        total = 0
        for key, record in self._nodes.delta_items():
            total += len(
                json.dumps(
                    {
                        "id": record.id,
                        "class": record.nf_class,
                        "status": record.status.value,
                        "attributes": record.attributes,
                        "lastUpdated": record.last_updated,
                    },
                    sort_keys=True,
                )
            )
        for cow in (self._out, self._in):
            for key, edges in cow.delta_items():
                total += len(json.dumps([e.as_tuple() for e in edges]))
        return total


# ---- Topology documents ----


def graph_to_document(graph: Graph) -> dict:
    """Canonical JSON-ready form: stable ordering, round-trip safe."""
    return {
        "classes": [
            {"name": name, "parent": parent}
            for name, parent in graph.hierarchy.extra_classes()
        ],
        "nodes": [
            {
                "id": record.id,
                "class": record.nf_class,
                "status": record.status.value,
                "attributes": {k: record.attributes[k] for k in sorted(record.attributes)},
                "lastUpdated": record.last_updated,
            }
            for record in graph.records()
        ],
        "edges": [
            {"src": e[0], "dst": e[1], "iface": e[2], "timestamp": e[3]}
            for e in sorted(edge.as_tuple() for edge in graph.edges())
        ],
    }


def _find_line(text: str | None, token: str) -> str:
    if not text:
        return ""
    for number, line in enumerate(text.splitlines(), start=1):
        if token in line:
            return f" (line {number})"
    return ""


def graph_from_document(doc: dict, source_text: str | None = None) -> Graph:
    if not isinstance(doc, dict):
        raise ParseError("topology document must be a JSON object")
    hierarchy = ClassHierarchy()
    for index, entry in enumerate(doc.get("classes", [])):
        name, parent = entry.get("name"), entry.get("parent")
        if not isinstance(name, str) or not isinstance(parent, str):
            raise ParseError(f"classes[{index}]: each class needs a name and a parent")
        if not hierarchy.knows(parent):
            raise UnknownClass(
                f"classes[{index}]{_find_line(source_text, name)}: "
                f"unknown parent class {parent!r}"
            )
        hierarchy.add_class(name, parent)

    graph = Graph(hierarchy=hierarchy)
    for index, entry in enumerate(doc.get("nodes", [])):
        node_id = entry.get("id")
        if not isinstance(node_id, str) or not node_id:
            raise ParseError(f"nodes[{index}]: missing id")
        where = f"nodes[{index}]{_find_line(source_text, node_id)}"
        nf_class = entry.get("class")
        if not isinstance(nf_class, str) or not hierarchy.knows(nf_class):
            raise UnknownClass(f"{where}: unknown class {nf_class!r}")
        try:
            status = NodeStatus(entry.get("status", "ACTIVE"))
        except ValueError:
            raise ParseError(f"{where}: unknown status {entry.get('status')!r}") from None
        attributes = entry.get("attributes", {})
        if not isinstance(attributes, dict):
            raise ParseError(f"{where}: attributes must be an object")
        cleaned: dict[str, float] = {}
        for key, value in attributes.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ParseError(f"{where}: attribute {key!r} must be numeric")
            cleaned[str(key)] = float(value)
        last_updated = entry.get("lastUpdated", 0)
        if not isinstance(last_updated, int):
            raise ParseError(f"{where}: lastUpdated must be an integer")
        try:
            graph.add_node(
                NodeRecord(
                    id=node_id,
                    nf_class=nf_class,
                    status=status,
                    attributes=cleaned,
                    last_updated=last_updated,
                )
            )
        except DuplicateId:
            raise DuplicateId(f"{where}: duplicate node id {node_id!r}") from None

    for index, entry in enumerate(doc.get("edges", [])):
        src, dst = entry.get("src"), entry.get("dst")
        iface = entry.get("iface")
        where = f"edges[{index}]{_find_line(source_text, str(iface))}"
        timestamp = entry.get("timestamp", 0)
        if not isinstance(timestamp, int):
            raise ParseError(f"{where}: timestamp must be an integer")
        try:
            graph.add_edge(str(src), str(dst), str(iface), timestamp)
        except (UnknownEndpoint, UnknownInterface) as exc:
            raise type(exc)(f"{where}: {exc}") from None

    # The clock starts at the newest telemetry stamp present in the file.
    graph.clock = max((r.last_updated for r in graph.records()), default=0)
    return graph


def load_topology(path: str) -> Graph:
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return graph_from_document(doc, source_text=text)


def save_topology(graph: Graph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(graph_to_document(graph), handle, indent=2, sort_keys=False)
        handle.write("\n")
