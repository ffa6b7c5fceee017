import io
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import make_graph
from gspec.actions import (
    AddEdge,
    MigrateTraffic,
    Plan,
    SetAttribute,
    SetStatus,
    TraceStep,
)
from gspec.agents import FailingAgent, FixedPlanAgent
from gspec.engine import (
    KIND_AGENT_FAILURE,
    KIND_HALLUCINATION,
    KIND_POLICY,
    KIND_STALE,
    EngineConfig,
    Intent,
    export_audit,
    govern,
    replay_audit,
    verify,
)
from gspec.errors import SoundnessError
from gspec.nkg import NodeStatus
from gspec.policy import (
    AttributeRange,
    Freshness,
    PolicySet,
    PolicyShape,
    validate,
)


def small_world():
    graph = make_graph(
        [
            ("upf-a", "UPFFunction", NodeStatus.ACTIVE, {"sessionLoad": 40.0}, 100),
            ("upf-b", "UPFFunction", NodeStatus.ACTIVE, {"sessionLoad": 30.0}, 100),
            ("tr-a", "TransportNode", NodeStatus.ACTIVE, {}, 100),
            ("sl-a", "NetworkSlice", NodeStatus.ACTIVE, {"plannedCapacity": 100.0}, 100),
            ("old-upf", "UPFFunction", NodeStatus.DECOMMISSIONED, {}, 100),
        ],
        edges=[
            ("upf-a", "tr-a", "N6"),
            ("upf-b", "tr-a", "N6"),
            ("sl-a", "upf-a", "s-nssai-config"),
        ],
    )
    graph.clock = 100
    return graph


def load_shape(limit=60.0):
    return PolicyShape(
        id="load", target_class="UPFFunction",
        constraint=AttributeRange(attribute="sessionLoad", min_inclusive=0.0, max_inclusive=limit),
        message="session load outside the engineered ceiling",
    )


def fresh_shape(max_age=15):
    return PolicyShape(
        id="fresh", target_class="UPFFunction",
        constraint=Freshness(max_age_seconds=max_age), message="telemetry stale",
    )


def plan_of(*actions, intent="test"):
    return Plan(intent=intent, actions=tuple(actions), trace=tuple(TraceStep(plan=a.kind) for a in actions))


def run(graph, plan, shapes, now=100, config=None):
    policy_set = PolicySet(shapes=tuple(shapes))
    intent = Intent(goal=plan.intent, entities=(plan.actions[0].targets()[0],))
    agent = FixedPlanAgent(plan)
    return govern(intent, graph, policy_set, agent, config=config, now=now)


def test_accept_commits_and_audits():
    graph = small_world()
    before = graph.graph_hash()
    plan = plan_of(
        SetAttribute(node="upf-a", attribute="sessionLoad", value=55.0),
        SetAttribute(node="upf-b", attribute="sessionLoad", value=35.0),
    )
    verdict, committed, records = run(graph, plan, [load_shape()], now=110)
    assert verdict.accepted
    assert committed is graph
    assert graph.get_node("upf-a").attributes["sessionLoad"] == 55.0
    assert graph.graph_hash() != before
    assert len(records) == 2
    # hash chain: each step starts where the previous ended
    assert records[0].post_hash == records[1].pre_hash
    assert records[-1].post_hash == graph.graph_hash()
    assert all(r.timestamp == 110 for r in records)
    assert verdict.ts == 110
    assert verdict.subgraph_k >= 1


def test_rejection_is_atomic():
    graph = small_world()
    before = graph.graph_hash()
    plan = plan_of(
        SetAttribute(node="upf-b", attribute="sessionLoad", value=10.0),  # fine
        SetAttribute(node="upf-a", attribute="sessionLoad", value=99.0),  # violates
    )
    verdict, _, records = run(graph, plan, [load_shape()], now=110)
    assert not verdict.accepted
    assert verdict.kind == KIND_POLICY
    assert verdict.failed_action_index == 1
    assert records == []
    assert graph.graph_hash() == before
    assert graph.get_node("upf-b").attributes["sessionLoad"] == 30.0


def test_hallucination_gate_dominates_policy():
    graph = small_world()
    before = graph.graph_hash()
    # Targets a decommissioned node AND would violate the load ceiling:
    # membership is checked first, so the verdict is a hallucination.
    plan = plan_of(SetAttribute(node="old-upf", attribute="sessionLoad", value=999.0))
    verdict, _, records = run(graph, plan, [load_shape()], now=110)
    assert verdict.kind == KIND_HALLUCINATION
    assert "old-upf" in verdict.reason
    assert verdict.failed_action_index == 0
    assert records == []
    assert graph.graph_hash() == before


def test_membership_gate_checks_pre_action_state():
    graph = small_world()
    # An action cannot legitimize its own target: flipping the status of a
    # decommissioned node is itself a hallucinated reference.
    plan = plan_of(SetStatus(node="old-upf", status=NodeStatus.ACTIVE))
    verdict, _, _ = run(graph, plan, [load_shape()], now=110)
    assert verdict.kind == KIND_HALLUCINATION


def test_gate_disabled_lets_ghost_actions_commit():
    graph = small_world()
    plan = plan_of(SetStatus(node="old-upf", status=NodeStatus.ACTIVE))
    config = EngineConfig(membership_gate=False, policy_validation=False, post_commit_check=False)
    verdict, _, records = run(graph, plan, [load_shape()], now=110, config=config)
    assert verdict.accepted
    assert len(records) == 1
    assert graph.get_node("old-upf").status is NodeStatus.ACTIVE


def test_stale_state_classification():
    graph = small_world()
    plan = plan_of(SetAttribute(node="upf-a", attribute="sessionLoad", value=41.0))
    # now is far past every lastUpdated, and only the touched node gets a new
    # stamp, so its neighbors in scope trip the freshness shape.
    verdict, _, _ = run(graph, plan, [fresh_shape()], now=500)
    assert not verdict.accepted
    assert verdict.kind == KIND_STALE


def test_policy_violation_outranks_stale_in_classification():
    graph = small_world()
    plan = plan_of(SetAttribute(node="upf-a", attribute="sessionLoad", value=99.0))
    verdict, _, _ = run(graph, plan, [fresh_shape(), load_shape()], now=500)
    assert verdict.kind == KIND_POLICY
    assert verdict.reason == "session load outside the engineered ceiling"


def test_agent_exception_becomes_agent_failure_verdict():
    graph = small_world()
    intent = Intent(goal="x", entities=("upf-a",))
    verdict, _, records = govern(intent, graph, PolicySet(shapes=(load_shape(),)), FailingAgent(), now=110)
    assert verdict.kind == KIND_AGENT_FAILURE
    assert "planner offline" in verdict.reason
    assert records == []


def test_empty_plan_is_agent_failure():
    class EmptyAgent(FixedPlanAgent):
        def plan(self, subgraph, intent):
            return Plan(intent="noop", actions=(), trace=())

    graph = small_world()
    intent = Intent(goal="x", entities=("upf-a",))
    verdict, _, _ = govern(
        intent, graph, PolicySet(shapes=(load_shape(),)), EmptyAgent(None), now=110
    )
    assert verdict.kind == KIND_AGENT_FAILURE


def test_verify_single_action_entry_point():
    graph = small_world()
    sim = graph.snapshot()
    verdict = verify(
        SetAttribute(node="upf-a", attribute="sessionLoad", value=99.0),
        sim,
        PolicySet(shapes=(load_shape(),)),
        now=100,
        reference=graph,
    )
    assert not verdict.accepted
    assert verdict.kind == KIND_POLICY
    ghost = verify(
        SetAttribute(node="old-upf", attribute="sessionLoad", value=1.0),
        graph.snapshot(),
        PolicySet(shapes=(load_shape(),)),
        now=100,
    )
    assert ghost.kind == KIND_HALLUCINATION


def test_post_commit_report_recorded_not_asserted():
    graph = small_world()
    plan = plan_of(SetAttribute(node="upf-a", attribute="sessionLoad", value=55.0))
    config = EngineConfig(post_commit_check=True)
    verdict, _, _ = run(graph, plan, [load_shape()], now=110, config=config)
    assert verdict.accepted
    assert verdict.post_commit_report is not None
    assert verdict.post_commit_report.conforms


def test_audit_export_and_replay_reproduce_final_hash(tmp_path):
    graph = small_world()
    start = graph.snapshot()
    plan = plan_of(
        SetAttribute(node="upf-a", attribute="sessionLoad", value=55.0),
        MigrateTraffic(from_node="upf-a", to_node="upf-b"),
    )
    verdict, _, records = run(graph, plan, [load_shape()], now=110)
    assert verdict.accepted
    path = tmp_path / "audit.jsonl"
    export_audit(records, str(path), verdict)

    replayed = replay_audit(start, str(path))
    assert replayed.graph_hash() == graph.graph_hash()


def test_audit_replay_detects_tampering(tmp_path):
    graph = small_world()
    start = graph.snapshot()
    plan = plan_of(SetAttribute(node="upf-a", attribute="sessionLoad", value=55.0))
    verdict, _, records = run(graph, plan, [load_shape()], now=110)
    path = tmp_path / "audit.jsonl"
    export_audit(records, str(path), verdict)

    lines = path.read_text().splitlines()
    entry = json.loads(lines[0])
    entry["action"]["value"] = 59.0  # doctor the recorded action
    path.write_text(json.dumps(entry) + "\n")
    with pytest.raises(SoundnessError):
        replay_audit(start, str(path))


def test_rejected_verdict_exports_single_verdict_line():
    graph = small_world()
    plan = plan_of(SetAttribute(node="upf-a", attribute="sessionLoad", value=999.0))
    verdict, _, records = run(graph, plan, [load_shape()], now=110)
    sink = io.StringIO()
    export_audit(records, sink, verdict)
    lines = [json.loads(l) for l in sink.getvalue().splitlines()]
    assert len(lines) == 1
    assert lines[0]["outcome"] == "REJECTED"
    assert lines[0]["kind"] == KIND_POLICY
    assert lines[0]["failedActionIndex"] == 0


def test_audit_record_json_schema():
    graph = small_world()
    plan = plan_of(SetAttribute(node="upf-a", attribute="sessionLoad", value=55.0))
    _, _, records = run(graph, plan, [load_shape()], now=110)
    entry = json.loads(records[0].to_json_line())
    assert set(entry) == {"seq", "ts", "intent", "actionIndex", "action", "trace", "preHash", "postHash"}


def test_replay_rejects_wrong_start_state(tmp_path):
    graph = small_world()
    plan = plan_of(SetAttribute(node="upf-a", attribute="sessionLoad", value=55.0))
    verdict, _, records = run(graph, plan, [load_shape()], now=110)
    path = tmp_path / "audit.jsonl"
    export_audit(records, str(path), verdict)
    wrong = small_world()
    wrong.set_attribute("upf-b", "sessionLoad", 31.0, 101)
    with pytest.raises(SoundnessError):
        replay_audit(wrong, str(path))


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2_000_000_000))
def test_atomicity_property_small(seed):
    rng = random.Random(seed)
    graph = small_world()
    before = graph.graph_hash()
    clean = [
        SetAttribute(node="upf-a", attribute="sessionLoad", value=float(rng.randint(0, 60))),
        SetAttribute(node="upf-b", attribute="sessionLoad", value=float(rng.randint(0, 60))),
        MigrateTraffic(from_node="upf-a", to_node="upf-b"),
    ]
    bad_kind = rng.randrange(2)
    if bad_kind == 0:
        bad = SetAttribute(node="upf-a", attribute="sessionLoad", value=float(rng.randint(61, 500)))
    else:
        bad = SetAttribute(node="old-upf", attribute="sessionLoad", value=1.0)
    position = rng.randint(0, len(clean))
    actions = clean[:position] + [bad] + clean[position:]
    plan = plan_of(*actions)
    verdict, _, records = run(graph, plan, [load_shape()], now=110)
    assert not verdict.accepted
    assert verdict.failed_action_index == position
    assert records == []
    assert graph.graph_hash() == before
