import pytest

from gspec.errors import InvalidCounts
from gspec.nkg import NodeStatus
from gspec.scenarios import (
    KIND_LINK_FAILURE,
    KIND_SLICE_SLA,
    KIND_STATE_DRIFT,
    KIND_UPF_CONGESTION,
    SCENARIO_KINDS,
    apply_fault,
    cleared,
    default_counts,
    generate_scenarios,
)


def test_default_counts_keep_the_canonical_ratio():
    counts = default_counts(500)
    assert counts[KIND_UPF_CONGESTION] == 150
    assert counts[KIND_LINK_FAILURE] == 150
    assert counts[KIND_SLICE_SLA] == 100
    assert counts[KIND_STATE_DRIFT] == 100
    assert sum(default_counts(100).values()) == 100
    assert sum(default_counts(7).values()) == 7


def test_generation_is_deterministic(topology450):
    one = generate_scenarios(default_counts(60), topology450, seed=5)
    two = generate_scenarios(default_counts(60), topology450, seed=5)
    assert one == two
    three = generate_scenarios(default_counts(60), topology450, seed=6)
    assert one != three


def test_generated_mix_matches_request(topology450):
    scenarios = generate_scenarios(default_counts(60), topology450, seed=5)
    by_kind = {kind: 0 for kind in SCENARIO_KINDS}
    for scenario in scenarios:
        by_kind[scenario.kind] += 1
    assert by_kind == default_counts(60)


def test_entities_exist_and_are_active(topology450):
    for scenario in generate_scenarios(default_counts(80), topology450, seed=2):
        for entity in scenario.intent.entities:
            assert topology450.has_node(entity), scenario.name
            if not scenario.expected_rejected:
                assert topology450.contains_active(entity), scenario.name


def test_stale_traps_alternate_within_state_kind(topology450):
    scenarios = generate_scenarios(default_counts(80), topology450, seed=2)
    drift = [s for s in scenarios if s.kind == KIND_STATE_DRIFT]
    traps = [s for s in drift if s.expected_rejected]
    plain = [s for s in drift if not s.expected_rejected]
    assert traps and plain
    for trap in traps:
        assert trap.stale_region
        assert trap.intent.entities[0] in trap.stale_region


@pytest.mark.parametrize(
    "counts",
    [
        {"UpfCongestion": -1, "LinkFailure": 1, "SliceSlaBreach": 1, "StateConsistency": 1},
        {"UpfCongestion": 0, "LinkFailure": 0, "SliceSlaBreach": 0, "StateConsistency": 0},
        {"NoSuchKind": 5},
    ],
)
def test_bad_counts_rejected(topology450, counts):
    with pytest.raises(InvalidCounts):
        generate_scenarios(counts, topology450, seed=0)


def test_fault_and_cleared_roundtrip(topology450):
    scenarios = generate_scenarios(default_counts(40), topology450, seed=9)
    graph = topology450.snapshot()
    now = graph.clock + 10

    congestion = next(s for s in scenarios if s.kind == KIND_UPF_CONGESTION)
    apply_fault(graph, congestion, now)
    assert graph.get_node(congestion.fault["node"]).attributes["sessionLoad"] == 95.0
    assert not cleared(graph, congestion)
    graph.set_attribute(congestion.fault["node"], "sessionLoad", 40.0, now)
    assert cleared(graph, congestion)

    link = next(s for s in scenarios if s.kind == KIND_LINK_FAILURE)
    apply_fault(graph, link, now)
    assert not cleared(graph, link)
    path = tuple(link.intent.params["newPath"])
    for src, dst in zip(path, path[1:]):
        graph.add_edge(src, dst, "transportLink", now)
    assert cleared(graph, link)

    sla = next(s for s in scenarios if s.kind == KIND_SLICE_SLA)
    apply_fault(graph, sla, now)
    assert graph.get_node(sla.fault["node"]).attributes["latencyMs"] == 25.0
    assert not cleared(graph, sla)
    graph.set_attribute(sla.fault["node"], "latencyMs", 8.0, now)
    assert cleared(graph, sla)

    drift = next(s for s in scenarios if s.kind == KIND_STATE_DRIFT and not s.expected_rejected)
    apply_fault(graph, drift, now)
    assert graph.get_node(drift.fault["node"]).status is NodeStatus.STANDBY
    assert not cleared(graph, drift)
    graph.set_status(drift.fault["node"], NodeStatus.ACTIVE, now)
    assert cleared(graph, drift)


def test_stale_trap_has_no_fault_to_apply(topology450):
    scenarios = generate_scenarios(default_counts(80), topology450, seed=2)
    trap = next(s for s in scenarios if s.expected_rejected)
    graph = topology450.snapshot()
    before = graph.graph_hash()
    apply_fault(graph, trap, graph.clock + 10)
    assert graph.graph_hash() == before
    assert not cleared(graph, trap)
