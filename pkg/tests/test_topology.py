import statistics

import pytest

from gspec.errors import InvalidSpec
from gspec.nkg import NodeStatus
from gspec.policy import validate
from gspec.topology import (
    TopologySpec,
    VENDOR_UPF_CLASS,
    generate_topology,
    ghost_pool,
    regions_of,
)


def test_same_seed_same_graph():
    one = generate_topology(TopologySpec(n_nodes=450, seed=7))
    two = generate_topology(TopologySpec(n_nodes=450, seed=7))
    assert one.graph_hash() == two.graph_hash()


def test_different_seed_different_graph():
    one = generate_topology(TopologySpec(n_nodes=450, seed=7))
    two = generate_topology(TopologySpec(n_nodes=450, seed=8))
    assert one.graph_hash() != two.graph_hash()


def test_node_and_edge_budget(topology450):
    assert topology450.node_count == 450
    # edge factor 2.67 with a 5% tolerance band
    assert 1140 <= topology450.edge_count <= 1260


def test_generated_topology_conforms(topology450, corpus):
    report = validate(topology450, corpus, topology450.clock, reference=topology450)
    assert report.conforms, report.violations[:5]


def test_ghost_pool_is_decommissioned(topology450):
    pool = ghost_pool(topology450)
    assert len(pool) >= 2
    for ghost in pool:
        assert topology450.get_node(ghost).status is NodeStatus.DECOMMISSIONED


def test_vendor_subclass_present(topology450):
    vendors = [
        r.id for r in topology450.records() if r.nf_class == VENDOR_UPF_CLASS
    ]
    assert vendors
    upfs = topology450.instances_of("UPFFunction")
    assert set(vendors) <= set(upfs)
    assert set(vendors) <= set(topology450.instances_of("ManagedFunction"))


def test_standby_nodes_present(topology450):
    standby = [r.id for r in topology450.records() if r.status is NodeStatus.STANDBY]
    assert standby


def test_regions_partition_active_nodes(topology450):
    regions = regions_of(topology450)
    assert len(regions) == 10  # 450 nodes / 45 per region
    total = sum(len(members) for members in regions.values())
    assert total == topology450.node_count


def test_local_neighborhoods_stay_small(topology450):
    upfs = sorted(topology450.instances_of("UPFFunction"))[:40]
    ks = [topology450.extract_subgraph((u,), 2, use_cache=False).k for u in upfs]
    assert 6 <= statistics.median(ks) <= 16


@pytest.mark.parametrize(
    "spec",
    [
        TopologySpec(n_nodes=5),
        TopologySpec(n_nodes=450, edge_factor=0.5),
        TopologySpec(n_nodes=450, class_mix={"UPFFunction": 1.0}),
    ],
)
def test_invalid_specs_rejected(spec):
    with pytest.raises(InvalidSpec):
        generate_topology(spec)


def test_larger_sizes_scale_node_counts():
    graph = generate_topology(TopologySpec(n_nodes=1000, edge_factor=3.0, seed=3))
    assert graph.node_count == 1000
    assert abs(graph.edge_count - 3000) <= 150
