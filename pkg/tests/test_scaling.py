import math
import random

import pytest

from gspec.errors import DegenerateInput, InsufficientSizes, InvalidSpec
from gspec.scaling import fit_power_law, run_scaling

from oracles import EXACT_LINE, EXACT_LINE_COEFFICIENT, EXACT_LINE_EXPONENT, oracle_power_fit


def test_fit_recovers_exact_power_law():
    exponent, coefficient = fit_power_law(EXACT_LINE)
    assert exponent == pytest.approx(EXACT_LINE_EXPONENT, abs=1e-9)
    assert coefficient == pytest.approx(EXACT_LINE_COEFFICIENT, abs=1e-9)


def test_fit_matches_reference_regression():
    rng = random.Random(17)
    for _ in range(25):
        points = [
            (rng.uniform(1.0, 50.0), rng.uniform(0.5, 400.0))
            for _ in range(rng.randint(3, 12))
        ]
        exponent, coefficient = fit_power_law(points)
        ref_exponent, ref_coefficient = oracle_power_fit(points)
        assert exponent == pytest.approx(ref_exponent, rel=1e-9)
        assert coefficient == pytest.approx(ref_coefficient, rel=1e-9)


@pytest.mark.parametrize(
    "points",
    [
        [(1.0, 2.0), (2.0, 4.0)],
        [(1.0, 2.0), (2.0, -4.0), (3.0, 6.0)],
        [(0.0, 2.0), (2.0, 4.0), (3.0, 6.0)],
        [(2.0, 1.0), (2.0, 2.0), (2.0, 3.0)],
    ],
)
def test_fit_rejects_degenerate_input(points):
    with pytest.raises(DegenerateInput):
        fit_power_law(points)


def test_scaling_rejects_bad_requests(corpus):
    with pytest.raises(InsufficientSizes):
        run_scaling(sizes=(450, 1000, 5000), reps=1, policy_set=corpus)
    with pytest.raises(InvalidSpec):
        run_scaling(sizes=(450, 900, 1350, 1800), reps=0, policy_set=corpus)


def test_toy_scaling_run(corpus):
    result = run_scaling(sizes=(450, 900, 1350, 1800), reps=2, policy_set=corpus, seed=4)
    sizes = [row.n_nodes for row in result.rows]
    assert sizes == [450, 900, 1350, 1800]
    for row in result.rows:
        assert row.n_edges > row.n_nodes
        assert row.median_k >= 1.0
        assert row.median_validation_ms > 0.0
    assert math.isfinite(result.fitted_exponent)
    assert result.coefficient > 0.0

    csv = result.to_csv()
    lines = csv.strip().splitlines()
    assert lines[0] == "n,m,k,latencyMs"
    assert len(lines) == 5
    assert lines[1].startswith("450,")

    doc = result.to_document()
    assert set(doc) == {"rows", "fittedExponent", "coefficient"}
    assert set(doc["rows"][0]) == {"n", "m", "medianK", "medianValidationMs"}
