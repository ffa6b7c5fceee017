"""Seeded synthetic topology generator.

The layout is a ring of regional clusters. Each region wires gNBs through
an access/core chain (gNB -> AMF -> SMF -> UPF -> transport) with slices
attached by membership edges, and regions join through a transport backbone.
Local degree is kept low and nearly size-independent so that the 2-hop
neighborhood around a fault stays small while the node count grows; a
logarithmic monitoring overlay adds the gentle growth in neighborhood size
that larger networks show. Generated graphs conform to the shipped corpus.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .corpus import build_default_corpus, required_attributes
from .errors import InvalidSpec
from .nkg import ClassHierarchy, Graph, NodeRecord, NodeStatus

REGION_SIZE = 45

DEFAULT_CLASS_MIX: dict[str, float] = {
    "GnbFunction": 8 / 45,
    "AMFFunction": 4 / 45,
    "SMFFunction": 4 / 45,
    "UPFFunction": 8 / 45,
    "TransportNode": 12 / 45,
    "NetworkSlice": 9 / 45,
}

_CORE_CLASSES = tuple(DEFAULT_CLASS_MIX)

_SHORT = {
    "GnbFunction": "gnb",
    "AMFFunction": "amf",
    "SMFFunction": "smf",
    "UPFFunction": "upf",
    "TransportNode": "tr",
    "NetworkSlice": "slice",
}

VENDOR_UPF_CLASS = "VendorAUpf"

# Tuning constants. These shape the 2-hop neighborhood statistics; the suite
# and scaling tests pin the resulting k profile.
SMF_UPF_FANOUT = 2
STANDBY_EVERY = 9  # every 9th SMF/UPF starts on standby
VENDOR_EVERY = 6  # every 6th UPF is the vendor variant
GHOST_FRACTION = 0.02  # share of gNBs decommissioned at generation time
MONITOR_LOG_COEFF = 3.0  # per-region monitoring edges per doubling over 450

# Conforming sample ranges for every attribute the corpus governs.
_ATTRIBUTE_RANGES: dict[str, tuple[float, float]] = {
    "plannedCapacity": (90.0, 150.0),
    "sessionLoad": (20.0, 60.0),
    "registeredUes": (1000.0, 50000.0),
    "taCount": (5.0, 100.0),
    "pduSessions": (100.0, 20000.0),
    "throughputMbps": (100.0, 5000.0),
    "connectedUes": (50.0, 5000.0),
    "radioUtilization": (10.0, 70.0),
    "cellCount": (3.0, 12.0),
    "linkUtilization": (10.0, 70.0),
    "capacityGbps": (40.0, 200.0),
    "allocatedBandwidth": (20.0, 95.0),
    "guaranteedBitrate": (5.0, 50.0),
}


@dataclass(frozen=True, slots=True)
class TopologySpec:
    n_nodes: int
    edge_factor: float = 2.67
    class_mix: dict[str, float] = field(default_factory=dict)
    seed: int = 0


def _normalized_mix(spec: TopologySpec) -> dict[str, float]:
    mix = dict(spec.class_mix) if spec.class_mix else dict(DEFAULT_CLASS_MIX)
    for name, share in mix.items():
        if name not in DEFAULT_CLASS_MIX:
            raise InvalidSpec(f"class mix names unknown class {name!r}")
        if not isinstance(share, (int, float)) or share < 0:
            raise InvalidSpec(f"class mix share for {name!r} must be non-negative")
    total = sum(mix.values())
    if total <= 0:
        raise InvalidSpec("class mix must have a positive total")
    for name in _CORE_CLASSES:
        if mix.get(name, 0) <= 0:
            raise InvalidSpec(f"class mix must include {name}")
    return {name: share / total for name, share in mix.items()}


def _class_totals(n: int, mix: dict[str, float]) -> dict[str, int]:
    # Largest-remainder rounding so the totals sum to exactly n.
    raw = {name: n * share for name, share in mix.items()}
    totals = {name: int(value) for name, value in raw.items()}
    shortfall = n - sum(totals.values())
    by_remainder = sorted(raw, key=lambda name: (raw[name] - totals[name]), reverse=True)
    for name in by_remainder[:shortfall]:
        totals[name] += 1
    for name in _CORE_CLASSES:
        if totals[name] < 1:
            raise InvalidSpec(f"{n} nodes leave no room for any {name}")
    return totals


def _split_across(total: int, buckets: int) -> list[int]:
    base, extra = divmod(total, buckets)
    return [base + (1 if i < extra else 0) for i in range(buckets)]


def generate_topology(spec: TopologySpec) -> Graph:
    if spec.n_nodes < 10:
        raise InvalidSpec("topology needs at least 10 nodes")
    if spec.edge_factor <= 1:
        raise InvalidSpec("edge factor must exceed 1")
    mix = _normalized_mix(spec)
    totals = _class_totals(spec.n_nodes, mix)
    n_regions = max(1, round(spec.n_nodes / REGION_SIZE))
    per_region = {name: _split_across(totals[name], n_regions) for name in totals}
    for name in _CORE_CLASSES:
        if any(count < 1 for count in per_region[name]):
            raise InvalidSpec(
                f"{spec.n_nodes} nodes across {n_regions} regions starve some region of {name}"
            )

    rng = random.Random(spec.seed)
    hierarchy = ClassHierarchy()
    hierarchy.add_class(VENDOR_UPF_CLASS, "UPFFunction")
    graph = Graph(hierarchy=hierarchy, clock=0)
    corpus = build_default_corpus()
    attrs_for = {
        name: tuple(sorted(required_attributes(corpus, hierarchy, name)))
        for name in (*_CORE_CLASSES, VENDOR_UPF_CLASS)
    }

    regions: list[dict[str, list[str]]] = []
    upf_serial = 0
    for r in range(n_regions):
        members: dict[str, list[str]] = {}
        for name in _CORE_CLASSES:
            ids = []
            for i in range(per_region[name][r]):
                node_id = f"r{r:02d}-{_SHORT[name]}-{i:02d}"
                nf_class = name
                if name == "UPFFunction":
                    upf_serial += 1
                    if upf_serial % VENDOR_EVERY == 0:
                        nf_class = VENDOR_UPF_CLASS
                attributes = {
                    attr: round(rng.uniform(*_ATTRIBUTE_RANGES[attr]), 1)
                    for attr in attrs_for[nf_class]
                }
                graph.add_node(
                    NodeRecord(
                        id=node_id,
                        nf_class=nf_class,
                        status=NodeStatus.ACTIVE,
                        attributes=attributes,
                        last_updated=0,
                    )
                )
                ids.append(node_id)
            members[name] = ids
        regions.append(members)

    base_edges: list[tuple[str, str, str]] = []

    def wire(src: str, dst: str, iface: str) -> None:
        graph.add_edge(src, dst, iface, 0)
        base_edges.append((src, dst, iface))

    # Index-aligned wiring keeps each function's service chain inside a small
    # pod, so 2-hop neighborhoods stay narrow instead of fanning out through
    # shared hubs.
    for members in regions:
        gnbs = members["GnbFunction"]
        amfs = members["AMFFunction"]
        smfs = members["SMFFunction"]
        upfs = members["UPFFunction"]
        trs = members["TransportNode"]
        slices = members["NetworkSlice"]
        for i, gnb in enumerate(gnbs):
            wire(gnb, amfs[i % len(amfs)], "N2")
            wire(gnb, trs[i % len(trs)], "transportLink")
            wire(gnb, upfs[i % len(upfs)], "N3")
        for a, amf in enumerate(amfs):
            wire(amf, smfs[a % len(smfs)], "N11")
        for s, smf in enumerate(smfs):
            for j in range(min(SMF_UPF_FANOUT, len(upfs))):
                wire(smf, upfs[(s + j) % len(upfs)], "N4")
        for u, upf in enumerate(upfs):
            # Same transport node as the pod's gNB: the pod shares one uplink.
            wire(upf, trs[u % len(trs)], "N6")
        if len(trs) > 1:
            for i, tr in enumerate(trs):
                wire(tr, trs[(i + 1) % len(trs)], "transportLink")
        for j, sl in enumerate(slices):
            wire(sl, gnbs[j % len(gnbs)], "s-nssai-config")
            wire(sl, upfs[j % len(upfs)], "s-nssai-config")

    if n_regions > 1:
        for r in range(n_regions):
            src = regions[r]["TransportNode"][-1]
            dst = regions[(r + 1) % n_regions]["TransportNode"][0]
            wire(src, dst, "transportLink")

    # Monitoring overlay: a few genuinely new tr->upf probes per region,
    # growing with the log of network size. This is what makes 2-hop
    # neighborhoods widen slowly as the topology scales.
    monitor_per_region = 0
    if spec.n_nodes > REGION_SIZE * 10:
        monitor_per_region = round(
            MONITOR_LOG_COEFF * math.log2(spec.n_nodes / (REGION_SIZE * 10))
        )
    for members in regions:
        for _ in range(monitor_per_region):
            wire(
                rng.choice(members["TransportNode"]),
                rng.choice(members["UPFFunction"]),
                "measurementPoint",
            )

    # Pad to the edge budget with parallel duplicates of existing links
    # (monitoring/protection copies). Duplicates never widen a neighborhood.
    target_edges = round(spec.edge_factor * spec.n_nodes)
    while graph.edge_count < target_edges:
        src, dst, iface = rng.choice(base_edges)
        graph.add_edge(src, dst, iface, 0)

    # Standby spares and the decommissioned ghost pool, applied after wiring
    # so retired nodes keep their (now inactive) edges in the store.
    for pool in ("SMFFunction", "UPFFunction"):
        flat = [node_id for members in regions for node_id in members[pool]]
        for i, node_id in enumerate(flat):
            if (i + 1) % STANDBY_EVERY == 0:
                graph.set_status(node_id, NodeStatus.STANDBY, 0)
    all_gnbs = [g for members in regions for g in members["GnbFunction"]]
    ghost_count = max(2, round(GHOST_FRACTION * len(all_gnbs)))
    for node_id in rng.sample(all_gnbs, min(ghost_count, len(all_gnbs))):
        graph.decommission_node(node_id, 0)

    graph.clock = 0
    return graph


def ghost_pool(graph: Graph) -> tuple[str, ...]:
    """Ids retired at generation time: present in the store, not active."""
    return tuple(
        record.id
        for record in graph.records()
        if record.status is NodeStatus.DECOMMISSIONED
    )


def regions_of(graph: Graph) -> dict[str, tuple[str, ...]]:
    """Group node ids by their region prefix."""
    grouped: dict[str, list[str]] = {}
    for node_id in graph.node_ids():
        grouped.setdefault(node_id.split("-", 1)[0], []).append(node_id)
    return {region: tuple(ids) for region, ids in grouped.items()}
