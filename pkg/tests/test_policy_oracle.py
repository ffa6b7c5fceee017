"""Randomized equivalence against the exhaustive reference checker.

The acceptance suite runs the full 500-graph version; this keeps a faster
copy in the unit tier so regressions surface immediately.
"""

import random

from gspec.policy import validate

from oracles import (
    oracle_validate,
    perturbed_copy,
    random_graph,
    random_shape_set,
    report_as_findings,
)


def test_random_graphs_match_oracle():
    for trial in range(150):
        rng = random.Random(31_000 + trial)
        reference = random_graph(rng)
        shapes = random_shape_set(rng)
        current = perturbed_copy(reference, rng)
        now = rng.randint(20, 60)
        expected = oracle_validate(current, shapes, now, reference=reference)
        got = report_as_findings(validate(current, shapes, now, reference=reference))
        assert got == expected, f"divergence on trial {trial}"


def test_random_graphs_match_oracle_under_scope():
    for trial in range(75):
        rng = random.Random(64_000 + trial)
        reference = random_graph(rng)
        shapes = random_shape_set(rng)
        current = perturbed_copy(reference, rng)
        now = rng.randint(20, 60)
        ids = list(current.node_ids())
        scope = rng.sample(ids, k=rng.randint(1, len(ids)))
        expected = oracle_validate(current, shapes, now, reference=reference, scope=scope)
        got = report_as_findings(
            validate(current, shapes, now, reference=reference, scope=scope)
        )
        assert got == expected, f"scoped divergence on trial {trial}"
