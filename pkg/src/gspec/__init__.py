"""Governed remediation for network knowledge graphs.

The package couples a versioned network knowledge graph, a declarative
constraint corpus, and a three-phase governance loop: agents plan against
a scoped subgraph, every action is simulated and validated before any
commit, and accepted plans land atomically with a hash-chained audit
trail.
"""

from .actions import (
    Action,
    AddEdge,
    DecommissionNode,
    MigrateTraffic,
    Plan,
    RemoveEdge,
    RerouteTraffic,
    RestartFunction,
    ScaleSlice,
    SetAttribute,
    SetStatus,
    TraceStep,
    apply_action,
    parse_plan,
    plan_to_document,
    simulate_action,
)
from .agents import (
    FailingAgent,
    FixedPlanAgent,
    MockAgent,
    MockAgentConfig,
    NaiveRestartAgent,
    SafeRemediationAgent,
    ScriptedAgent,
)
from .corpus import build_default_corpus
from .engine import (
    AgentInterface,
    AuditRecord,
    EngineConfig,
    Intent,
    Verdict,
    export_audit,
    govern,
    replay_audit,
    verify,
)
from .errors import GspecError
from .nkg import (
    ClassHierarchy,
    Graph,
    NodeRecord,
    NodeStatus,
    Subgraph,
    graph_from_document,
    graph_to_document,
    load_topology,
    save_topology,
)
from .policy import (
    PolicySet,
    PolicyShape,
    ValidationReport,
    Violation,
    load_policies,
    policies_to_document,
    policy_stats,
    validate,
)
from .scaling import ScalingResult, fit_power_law, run_scaling
from .scenarios import Scenario, generate_scenarios
from .suite import AblationFlags, RunMetrics, run_suite
from .topology import TopologySpec, generate_topology

__version__ = "0.1.0"

__all__ = [
    "Action",
    "AddEdge",
    "AgentInterface",
    "AblationFlags",
    "AuditRecord",
    "ClassHierarchy",
    "DecommissionNode",
    "EngineConfig",
    "FailingAgent",
    "FixedPlanAgent",
    "GspecError",
    "Graph",
    "Intent",
    "MigrateTraffic",
    "MockAgent",
    "MockAgentConfig",
    "NaiveRestartAgent",
    "NodeRecord",
    "NodeStatus",
    "Plan",
    "PolicySet",
    "PolicyShape",
    "RemoveEdge",
    "RerouteTraffic",
    "RestartFunction",
    "RunMetrics",
    "SafeRemediationAgent",
    "ScaleSlice",
    "ScalingResult",
    "Scenario",
    "ScriptedAgent",
    "SetAttribute",
    "SetStatus",
    "Subgraph",
    "TopologySpec",
    "TraceStep",
    "ValidationReport",
    "Verdict",
    "Violation",
    "apply_action",
    "build_default_corpus",
    "export_audit",
    "fit_power_law",
    "generate_scenarios",
    "generate_topology",
    "govern",
    "graph_from_document",
    "graph_to_document",
    "load_policies",
    "load_topology",
    "parse_plan",
    "plan_to_document",
    "policies_to_document",
    "policy_stats",
    "replay_audit",
    "run_scaling",
    "run_suite",
    "save_topology",
    "simulate_action",
    "validate",
    "verify",
]
