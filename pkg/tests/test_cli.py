import json
from pathlib import Path

import pytest

from gspec.cli import main
from gspec.engine import replay_audit
from gspec.nkg import load_topology, save_topology

DATA = Path(__file__).parent / "data"
TOPOLOGY = str(DATA / "urllc_topology.json")
PLAN = str(DATA / "urllc_plan.json")
RESTART_PLAN = str(DATA / "urllc_restart_plan.json")


def run_json(capsys, argv):
    rc = main(argv + ["--json"])
    return rc, json.loads(capsys.readouterr().out)


def test_topo_gen_writes_a_graph(tmp_path, capsys):
    out = tmp_path / "g.json"
    rc, doc = run_json(
        capsys, ["topo-gen", "--nodes", "450", "--seed", "1", "--out", str(out)]
    )
    assert rc == 0
    assert doc["nodes"] == 450
    assert doc["retired"] >= 2
    assert load_topology(str(out)).node_count == 450


def test_validate_conforming_graph(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert main(["topo-gen", "--nodes", "450", "--seed", "1", "--out", str(out)]) == 0
    capsys.readouterr()
    rc, doc = run_json(
        capsys, ["validate", "--graph", str(out), "--reference", str(out)]
    )
    assert rc == 0
    assert doc["conforms"] is True
    assert doc["policies"]["total"] == 93


def test_validate_requires_reference_for_delta_checks(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert main(["topo-gen", "--nodes", "450", "--seed", "1", "--out", str(out)]) == 0
    capsys.readouterr()
    rc = main(["validate", "--graph", str(out)])
    assert rc == 2
    assert "reference" in capsys.readouterr().err


def test_validate_flags_violations(tmp_path, capsys, topology450):
    graph = topology450.snapshot()
    slice_id = sorted(graph.instances_of("NetworkSlice"))[0]
    graph.set_attribute(slice_id, "allocatedBandwidth", 150.0, graph.clock)
    bad = tmp_path / "bad.json"
    save_topology(graph, str(bad))
    rc, doc = run_json(
        capsys, ["validate", "--graph", str(bad), "--reference", str(bad)]
    )
    assert rc == 1
    assert doc["conforms"] is False
    messages = {v["message"] for v in doc["report"]["violations"]}
    assert "Slice bandwidth cannot exceed 100 Mbps" in messages


def test_govern_accepts_and_audits(tmp_path, capsys):
    audit = tmp_path / "audit.jsonl"
    out = tmp_path / "committed.json"
    rc, doc = run_json(
        capsys,
        [
            "govern",
            "--graph",
            TOPOLOGY,
            "--plan",
            PLAN,
            "--goal",
            "rebalance-slice-capacity",
            "--entities",
            "slice-urllc,upf-1",
            "--audit",
            str(audit),
            "--out",
            str(out),
        ],
    )
    assert rc == 0
    assert doc["outcome"] == "ACCEPTED"
    lines = [json.loads(line) for line in audit.read_text().splitlines()]
    assert [entry["seq"] for entry in lines] == [0, 1, 2]
    replayed = replay_audit(load_topology(TOPOLOGY), str(audit))
    assert replayed.graph_hash() == load_topology(str(out)).graph_hash()


def test_govern_rejects_capacity_wipe(tmp_path, capsys):
    audit = tmp_path / "audit.jsonl"
    rc, doc = run_json(
        capsys,
        [
            "govern",
            "--graph",
            TOPOLOGY,
            "--plan",
            RESTART_PLAN,
            "--goal",
            "rebalance-slice-capacity",
            "--entities",
            "slice-urllc,amf-1",
            "--audit",
            str(audit),
        ],
    )
    assert rc == 1
    assert doc["outcome"] == "REJECTED"
    assert doc["kind"] == "PolicyViolation"
    assert doc["failedActionIndex"] == 0
    lines = [json.loads(line) for line in audit.read_text().splitlines()]
    assert len(lines) == 1
    assert lines[0]["outcome"] == "REJECTED"


def test_suite_command_smoke(capsys):
    rc, doc = run_json(
        capsys,
        ["suite", "--nodes", "450", "--scenarios", "20", "--seed", "2"],
    )
    assert rc == 0
    assert doc["total"] == 20
    assert doc["escapedViolations"] == 0
    assert doc["ablations"] == []


def test_suite_command_with_ablation(capsys):
    rc, doc = run_json(
        capsys,
        [
            "suite",
            "--nodes",
            "450",
            "--scenarios",
            "20",
            "--seed",
            "2",
            "--ghost-prob",
            "0.5",
            "--ablate",
            "nkg",
        ],
    )
    # Ablated runs report damage without failing the process.
    assert rc == 0
    assert doc["ablations"] == ["nkg"]
    assert doc["escapedViolations"] > 0


def test_bench_scale_writes_csv(tmp_path, capsys):
    csv_path = tmp_path / "scaling.csv"
    rc, doc = run_json(
        capsys,
        [
            "bench-scale",
            "--sizes",
            "450,900,1350,1800",
            "--reps",
            "2",
            "--seed",
            "4",
            "--csv",
            str(csv_path),
        ],
    )
    assert rc == 0
    assert len(doc["rows"]) == 4
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "n,m,k,latencyMs"
    assert len(lines) == 5


def test_unknown_command_is_a_usage_error(capsys):
    assert main(["no-such-command"]) == 2
    capsys.readouterr()


def test_policy_dir_env_override(tmp_path, capsys, monkeypatch, topology450):
    graph = topology450.snapshot()
    slice_id = sorted(graph.instances_of("NetworkSlice"))[0]
    graph.set_attribute(slice_id, "allocatedBandwidth", 150.0, graph.clock)
    bad = tmp_path / "bad.json"
    save_topology(graph, str(bad))

    policy_dir = tmp_path / "policies"
    policy_dir.mkdir()
    (policy_dir / "policies.json").write_text(json.dumps({"shapes": []}))
    monkeypatch.setenv("GSPEC_POLICY_DIR", str(policy_dir))

    rc, doc = run_json(capsys, ["validate", "--graph", str(bad)])
    assert rc == 0
    assert doc["conforms"] is True
    assert doc["policies"]["total"] == 0


def test_explicit_policies_beat_env_override(tmp_path, capsys, monkeypatch):
    policy_dir = tmp_path / "policies"
    policy_dir.mkdir()
    (policy_dir / "policies.json").write_text(json.dumps({"shapes": []}))
    monkeypatch.setenv("GSPEC_POLICY_DIR", str(policy_dir))

    shipped = Path(__file__).parents[1] / "src" / "gspec" / "data" / "policies.json"
    rc, doc = run_json(
        capsys,
        [
            "validate",
            "--graph",
            TOPOLOGY,
            "--reference",
            TOPOLOGY,
            "--policies",
            str(shipped),
        ],
    )
    assert rc in (0, 1)
    assert doc["policies"]["total"] == 93
