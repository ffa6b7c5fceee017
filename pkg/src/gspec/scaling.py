"""Scaling bench: subgraph size and validation latency across network sizes.

Each size gets its own generated topology and a burst of scripted,
conforming remediations. What is measured is the governed path itself:
the planning subgraph's node count and the scoped validation time per
plan. The homogeneous-region layout keeps those nearly flat as the node
count grows, which is the property the fit quantifies.
"""

from __future__ import annotations

import io
import math
import random
import statistics
from dataclasses import dataclass

from .agents import GOAL_RELIEVE_UPF, SafeRemediationAgent
from .engine import EngineConfig, Intent, govern
from .errors import DegenerateInput, InsufficientSizes, InvalidSpec
from .policy import PolicySet
from .topology import TopologySpec, generate_topology

DEFAULT_SIZES = (450, 1000, 5000, 10000, 20000)
DEFAULT_REPS = 20


@dataclass(frozen=True, slots=True)
class ScalingRow:
    n_nodes: int
    n_edges: int
    median_k: float
    median_validation_ms: float


@dataclass(frozen=True, slots=True)
class ScalingResult:
    rows: tuple[ScalingRow, ...]
    fitted_exponent: float
    coefficient: float

    def to_document(self) -> dict:
        return {
            "rows": [
                {
                    "n": row.n_nodes,
                    "m": row.n_edges,
                    "medianK": row.median_k,
                    "medianValidationMs": round(row.median_validation_ms, 3),
                }
                for row in self.rows
            ],
            "fittedExponent": round(self.fitted_exponent, 4),
            "coefficient": round(self.coefficient, 4),
        }

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("n,m,k,latencyMs\n")
        for row in self.rows:
            out.write(
                f"{row.n_nodes},{row.n_edges},{row.median_k:g},"
                f"{row.median_validation_ms:.3f}\n"
            )
        return out.getvalue()


def fit_power_law(points) -> tuple[float, float]:
    """Least-squares fit of y = c * x^a in log-log space.

    Returns (a, c). Rejects inputs a regression cannot support: fewer than
    three points, non-positive coordinates, or no spread on the x axis.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise DegenerateInput("a power-law fit needs at least three points")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise DegenerateInput("power-law fits need positive coordinates")
    xs = [math.log(x) for x, _ in pts]
    ys = [math.log(y) for _, y in pts]
    if len(set(xs)) == 1:
        raise DegenerateInput("all points share one x value")
    try:
        slope, intercept = statistics.linear_regression(xs, ys)
    except statistics.StatisticsError as exc:
        raise DegenerateInput(str(exc)) from None
    return slope, math.exp(intercept)


def run_scaling(
    sizes=DEFAULT_SIZES,
    reps: int = DEFAULT_REPS,
    policy_set: PolicySet | None = None,
    seed: int = 0,
) -> ScalingResult:
    ordered = sorted(set(int(n) for n in sizes))
    if len(ordered) < 4:
        raise InsufficientSizes("scaling needs at least four distinct sizes")
    if reps < 1:
        raise InvalidSpec("reps must be positive")
    if policy_set is None:
        from .corpus import build_default_corpus

        policy_set = build_default_corpus()

    config = EngineConfig(post_commit_check=False)
    agent = SafeRemediationAgent()
    rows: list[ScalingRow] = []
    for index, n in enumerate(ordered):
        factor = 2.67 if n < 1000 else 3.0
        graph = generate_topology(TopologySpec(n_nodes=n, edge_factor=factor, seed=seed + index))
        rng = random.Random(seed * 7919 + n)
        upfs = [
            u
            for u in sorted(graph.instances_of("UPFFunction"))
            if graph.contains_active(u)
        ]
        now = graph.clock
        ks: list[float] = []
        latencies: list[float] = []
        for _ in range(reps):
            upf = rng.choice(upfs)
            alternate = rng.choice([u for u in upfs if u != upf])
            graph.set_attribute(upf, "sessionLoad", 95.0, now)
            intent = Intent(
                goal=GOAL_RELIEVE_UPF,
                entities=(upf,),
                params={"alternate": alternate},
            )
            verdict, graph, _ = govern(intent, graph, policy_set, agent, config, now=now)
            if not verdict.accepted:
                raise InvalidSpec(
                    f"scaling plan rejected ({verdict.kind}): {verdict.reason}"
                )
            ks.append(float(verdict.subgraph_k))
            latencies.append(max(verdict.validation_ms, 1e-6))
        rows.append(
            ScalingRow(
                n_nodes=n,
                n_edges=graph.edge_count,
                median_k=statistics.median(ks),
                median_validation_ms=statistics.median(latencies),
            )
        )
    # Fit the size-level medians: per-rep scatter inside one size is noise
    # around a fixed setup cost, and pooling it would flatten the trend the
    # medians carry.
    exponent, coefficient = fit_power_law(
        [(row.median_k, row.median_validation_ms) for row in rows]
    )
    return ScalingResult(rows=tuple(rows), fitted_exponent=exponent, coefficient=coefficient)
