import json
from pathlib import Path

from gspec.corpus import (
    MSG_AMF_UPF,
    MSG_CAPACITY_DELTA,
    MSG_INVALID_STATUS,
    MSG_SLICE_BANDWIDTH,
    MSG_STALE,
    build_default_corpus,
    required_attributes,
)
from gspec.nkg import Graph
from gspec.policy import load_policies, policies_to_document, policy_stats

DATA_FILE = Path(__file__).resolve().parents[1] / "src" / "gspec" / "data" / "policies.json"


def test_family_counts(corpus):
    stats = policy_stats(corpus)
    assert stats["topological"] == 47
    assert stats["resource"] == 23
    assert stats["state"] == 18
    assert stats["temporal"] == 3
    assert stats["delta"] == 2
    assert stats["total"] == 93


def test_shape_ids_are_unique(corpus):
    ids = [shape.id for shape in corpus]
    assert len(ids) == len(set(ids))


def test_verbatim_messages_present(corpus):
    messages = {shape.message for shape in corpus}
    assert MSG_AMF_UPF in messages
    assert MSG_SLICE_BANDWIDTH in messages
    assert MSG_INVALID_STATUS in messages
    assert MSG_STALE in messages
    assert MSG_CAPACITY_DELTA in messages


def test_every_target_class_is_known(corpus):
    hierarchy = Graph().hierarchy
    hierarchy.add_class("VendorAUpf", "UPFFunction")
    for shape in corpus:
        assert hierarchy.knows(shape.target_class), shape.id


def test_shipped_data_file_matches_builder(corpus):
    with open(DATA_FILE, "r", encoding="utf-8") as handle:
        shipped = json.load(handle)
    assert shipped == policies_to_document(corpus)


def test_shipped_data_file_loads(corpus):
    loaded = load_policies(str(DATA_FILE))
    assert policies_to_document(loaded) == policies_to_document(corpus)


def test_required_attributes_cover_the_governed_surface(corpus):
    hierarchy = Graph().hierarchy
    upf_attrs = required_attributes(corpus, hierarchy, "UPFFunction")
    assert "sessionLoad" in upf_attrs
    slice_attrs = required_attributes(corpus, hierarchy, "NetworkSlice")
    assert "allocatedBandwidth" in slice_attrs
    assert "plannedCapacity" in slice_attrs
