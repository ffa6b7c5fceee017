"""Fault scenario construction for the remediation harness.

Each scenario bundles a fault to inflict on the committed graph, the
operator intent handed to the planning agent, and a predicate that decides
whether the fault was actually cleared. Staleness scenarios carry the set
of nodes whose heartbeat the harness must skip so their telemetry lapses.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .agents import (
    GOAL_REBALANCE_SLICE,
    GOAL_RELIEVE_UPF,
    GOAL_RESTORE_PATH,
    GOAL_RESTORE_STATUS,
)
from .engine import Intent
from .errors import InvalidCounts
from .nkg import Graph, NodeStatus
from .topology import regions_of

KIND_UPF_CONGESTION = "UpfCongestion"
KIND_LINK_FAILURE = "LinkFailure"
KIND_SLICE_SLA = "SliceSlaBreach"
KIND_STATE_DRIFT = "StateConsistency"

SCENARIO_KINDS = (
    KIND_UPF_CONGESTION,
    KIND_LINK_FAILURE,
    KIND_SLICE_SLA,
    KIND_STATE_DRIFT,
)

# Strict-lifecycle classes: nodes that must never sit on standby.
_STRICT_CLASSES = ("AMFFunction", "GnbFunction", "TransportNode")

CONGESTED_LOAD = 95.0
DRAINED_LOAD_CEILING = 80.0
BREACHED_LATENCY = 25.0
LATENCY_TARGET = 10.0


@dataclass(frozen=True, slots=True)
class Scenario:
    kind: str
    name: str
    intent: Intent
    fault: dict = field(default_factory=dict)
    stale_region: tuple[str, ...] = ()
    expected_rejected: bool = False


def apply_fault(graph: Graph, scenario: Scenario, now: int) -> None:
    """Inflict the scenario's fault on the committed graph."""
    fault = scenario.fault
    if scenario.kind == KIND_UPF_CONGESTION:
        graph.set_attribute(fault["node"], "sessionLoad", CONGESTED_LOAD, now)
    elif scenario.kind == KIND_LINK_FAILURE:
        graph.remove_edges(fault["src"], fault["dst"], "transportLink")
    elif scenario.kind == KIND_SLICE_SLA:
        graph.set_attribute(fault["node"], "latencyMs", BREACHED_LATENCY, now)
    elif scenario.kind == KIND_STATE_DRIFT:
        if fault:
            graph.set_status(fault["node"], NodeStatus.STANDBY, now)
    else:
        raise InvalidCounts(f"unknown scenario kind {scenario.kind!r}")


def cleared(graph: Graph, scenario: Scenario) -> bool:
    """Whether the committed graph no longer exhibits the fault."""
    if scenario.kind == KIND_UPF_CONGESTION:
        node = graph.get_node(scenario.fault["node"])
        load = node.attributes.get("sessionLoad")
        return isinstance(load, (int, float)) and load < DRAINED_LOAD_CEILING
    if scenario.kind == KIND_LINK_FAILURE:
        path = tuple(scenario.intent.params["newPath"])
        for src, dst in zip(path, path[1:]):
            hops = graph.out_edges(src)
            if not any(e.dst == dst and e.iface == "transportLink" for e in hops):
                return False
        return True
    if scenario.kind == KIND_SLICE_SLA:
        node = graph.get_node(scenario.fault["node"])
        latency = node.attributes.get("latencyMs")
        return isinstance(latency, (int, float)) and latency <= LATENCY_TARGET
    if scenario.kind == KIND_STATE_DRIFT:
        if not scenario.fault:
            return False
        return graph.get_node(scenario.fault["node"]).status is NodeStatus.ACTIVE
    return False


def _normalize_counts(counts) -> dict[str, int]:
    if isinstance(counts, dict):
        unknown = set(counts) - set(SCENARIO_KINDS)
        if unknown:
            raise InvalidCounts(f"unknown scenario kinds: {sorted(unknown)}")
        normalized = {kind: int(counts.get(kind, 0)) for kind in SCENARIO_KINDS}
    else:
        values = tuple(counts)
        if len(values) != len(SCENARIO_KINDS):
            raise InvalidCounts(
                f"expected {len(SCENARIO_KINDS)} counts, got {len(values)}"
            )
        normalized = {kind: int(v) for kind, v in zip(SCENARIO_KINDS, values)}
    if any(v < 0 for v in normalized.values()):
        raise InvalidCounts("scenario counts must be non-negative")
    if sum(normalized.values()) == 0:
        raise InvalidCounts("at least one scenario is required")
    return normalized


def default_counts(total: int) -> dict[str, int]:
    """The stock 30/30/20/20 mix (150/150/100/100 at 500), scaled to total."""
    if total < 1:
        raise InvalidCounts("total must be positive")
    base = {
        KIND_UPF_CONGESTION: round(total * 0.3),
        KIND_LINK_FAILURE: round(total * 0.3),
        KIND_SLICE_SLA: round(total * 0.2),
        KIND_STATE_DRIFT: round(total * 0.2),
    }
    drift = total - sum(base.values())
    base[KIND_UPF_CONGESTION] += drift
    return base


def generate_scenarios(counts, topology: Graph, seed: int = 0) -> list[Scenario]:
    """Deterministic scenario list for a topology; shuffled across kinds."""
    normalized = _normalize_counts(counts)
    rng = random.Random(seed)

    def active(ids) -> list[str]:
        return [i for i in sorted(ids) if topology.contains_active(i)]

    upfs = active(topology.instances_of("UPFFunction"))
    slices = active(topology.instances_of("NetworkSlice"))
    trs = active(topology.instances_of("TransportNode"))
    strict_pool = sorted(
        node_id for cls in _STRICT_CLASSES for node_id in active(topology.instances_of(cls))
    )
    ring_edges = [
        (tr, edge.dst)
        for tr in trs
        for edge in topology.out_edges(tr)
        if edge.iface == "transportLink" and edge.dst in set(trs)
    ]
    regions = regions_of(topology)
    region_names = sorted(regions)

    if normalized[KIND_UPF_CONGESTION] and len(upfs) < 2:
        raise InvalidCounts("congestion scenarios need at least two live UPFs")
    if normalized[KIND_LINK_FAILURE] and (not ring_edges or len(trs) < 3 or not slices):
        raise InvalidCounts("link failure scenarios need a transport ring and a slice")
    if normalized[KIND_SLICE_SLA] and not slices:
        raise InvalidCounts("SLA scenarios need at least one slice")
    if normalized[KIND_STATE_DRIFT] and (not strict_pool or not region_names):
        raise InvalidCounts("state scenarios need strict-lifecycle nodes")

    scenarios: list[Scenario] = []

    for i in range(normalized[KIND_UPF_CONGESTION]):
        upf = rng.choice(upfs)
        region = upf.split("-", 1)[0]
        local = [u for u in upfs if u != upf and u.startswith(region)]
        alternate = rng.choice(local if local else [u for u in upfs if u != upf])
        scenarios.append(
            Scenario(
                kind=KIND_UPF_CONGESTION,
                name=f"{KIND_UPF_CONGESTION}-{i:03d}",
                intent=Intent(
                    goal=GOAL_RELIEVE_UPF,
                    entities=(upf,),
                    params={"alternate": alternate},
                ),
                fault={"node": upf},
            )
        )

    for i in range(normalized[KIND_LINK_FAILURE]):
        src, dst = rng.choice(ring_edges)
        mid = rng.choice([t for t in trs if t not in (src, dst)])
        slice_id = rng.choice(slices)
        scenarios.append(
            Scenario(
                kind=KIND_LINK_FAILURE,
                name=f"{KIND_LINK_FAILURE}-{i:03d}",
                intent=Intent(
                    goal=GOAL_RESTORE_PATH,
                    entities=(src, dst),
                    params={
                        "slice": slice_id,
                        "oldPath": [src, dst],
                        "newPath": [src, mid, dst],
                    },
                ),
                fault={"src": src, "dst": dst},
            )
        )

    for i in range(normalized[KIND_SLICE_SLA]):
        slice_id = rng.choice(slices)
        scenarios.append(
            Scenario(
                kind=KIND_SLICE_SLA,
                name=f"{KIND_SLICE_SLA}-{i:03d}",
                intent=Intent(
                    goal=GOAL_REBALANCE_SLICE,
                    entities=(slice_id,),
                    params={"factor": 1.15},
                ),
                fault={"node": slice_id},
            )
        )

    # State scenarios alternate between a recoverable drift and a stale
    # telemetry trap the engine is expected to reject.
    for i in range(normalized[KIND_STATE_DRIFT]):
        if i % 2 == 0:
            node = rng.choice(strict_pool)
            scenarios.append(
                Scenario(
                    kind=KIND_STATE_DRIFT,
                    name=f"{KIND_STATE_DRIFT}-{i:03d}",
                    intent=Intent(goal=GOAL_RESTORE_STATUS, entities=(node,)),
                    fault={"node": node},
                )
            )
        else:
            region = rng.choice(region_names)
            members = regions[region]
            live = [m for m in members if topology.contains_active(m)]
            target = rng.choice(live)
            scenarios.append(
                Scenario(
                    kind=KIND_STATE_DRIFT,
                    name=f"{KIND_STATE_DRIFT}-{i:03d}",
                    intent=Intent(goal=GOAL_RESTORE_STATUS, entities=(target,)),
                    stale_region=tuple(members),
                    expected_rejected=True,
                )
            )

    rng.shuffle(scenarios)
    return scenarios
