import pytest

from gspec.corpus import build_default_corpus
from gspec.topology import TopologySpec, generate_topology


@pytest.fixture(scope="session")
def corpus():
    return build_default_corpus()


@pytest.fixture(scope="session")
def topology450():
    """Shared read-only topology; tests that mutate must snapshot() first."""
    return generate_topology(TopologySpec(n_nodes=450, seed=1))
