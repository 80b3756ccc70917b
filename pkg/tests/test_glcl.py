import json

import numpy as np
import pytest

from glcvis.dataset import AttributeMeta, Dataset, load_csv, normalize
from glcvis.glcl import (
    ExplanationDiff,
    LinearModel,
    ModelError,
    TrainConfig,
    accuracy_on,
    best_threshold,
    classify,
    classify_rows,
    explain_misclassified,
    polyline,
    project,
    prune_and_refit,
    reconstruct,
    train,
)


def make_dataset(rows, labels, names=None):
    matrix = np.asarray(rows, dtype=float)
    names = names or [f"x{i+1}" for i in range(matrix.shape[1])]
    attrs = tuple(
        AttributeMeta(n, float(matrix[:, j].min()), float(matrix[:, j].max()))
        for j, n in enumerate(names)
    )
    return Dataset(attributes=attrs, rows=matrix, labels=tuple(labels))


def model_of(coeffs, t=0.0, pos="pos", neg="neg"):
    return LinearModel(
        coefficients=np.asarray(coeffs, dtype=float),
        threshold=t,
        positive_class=pos,
        negative_class=neg,
    )


# ---------------------------------------------------------------------------
# projection and polyline


def test_project_zero_angles_sums_values():
    m = model_of([1.0, 1.0, 1.0, 1.0])
    assert project([1.0, 0.8, 1.2, 1.0], m) == pytest.approx(4.0, abs=1e-12)


def test_project_single_active_axis():
    m = model_of([1.0, 0.0, 0.0, 0.0])
    assert project([0.3, 9.0, 9.0, 9.0], m) == pytest.approx(0.3, abs=1e-12)


def test_project_hand_dot_product():
    m = model_of([0.6, -0.8])
    assert project([0.5, 0.5], m) == pytest.approx(-0.1, abs=1e-12)


def test_project_dimension_mismatch():
    with pytest.raises(ModelError):
        project([1.0], model_of([1.0, 1.0]))


def test_polyline_zero_vector():
    m = model_of([0.5, 0.5, 0.5])
    poly = polyline([0.0, 0.0, 0.0], m)
    assert np.allclose(poly.nodes, 0.0)
    assert poly.projection_value == 0.0
    assert poly.nodes.shape == (4, 2)


def test_polyline_four_attributes_gives_five_nodes():
    m = model_of([1.0, 0.9, 0.3, 0.7])
    poly = polyline([1.0, 0.8, 1.2, 1.0], m)
    assert poly.nodes.shape == (5, 2)
    assert poly.nodes[0].tolist() == [0.0, 0.0]


def test_projection_identity_property():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        n = int(rng.integers(1, 30))
        coeffs = rng.uniform(-1, 1, n)
        coeffs[rng.integers(0, n)] = 1.0  # canonical form
        m = model_of(coeffs)
        x = rng.uniform(0, 1, n)
        poly = polyline(x, m)
        assert abs(poly.projection_value - float(x @ coeffs)) < 1e-9


def test_reconstruct_round_trip_including_zero_coefficients():
    rng = np.random.default_rng(12)
    for _ in range(1000):
        n = int(rng.integers(1, 20))
        coeffs = rng.uniform(-1, 1, n)
        coeffs[rng.integers(0, n)] = 0.0  # exercise the vertical-only case
        m = model_of(coeffs)
        x = rng.uniform(0, 1, n)
        back = reconstruct(polyline(x, m), m)
        assert np.max(np.abs(back - x)) < 1e-9


def test_model_angles_match_coefficients():
    m = model_of([0.6, -0.8, 0.0, 1.0])
    assert np.allclose(np.cos(m.angles), np.abs(m.coefficients), atol=1e-12)
    assert m.signs.tolist() == [1.0, -1.0, 1.0, 1.0]


def test_model_rejects_out_of_range_coefficients():
    with pytest.raises(ModelError):
        model_of([1.5, 0.0])


# ---------------------------------------------------------------------------
# thresholds and classification


def brute_force_best_threshold(u, is_pos):
    """Independent oracle: try every midpoint and the two extremes."""
    u = np.asarray(u, float)
    candidates = [u.min() - 1.0, u.max() + 1.0]
    s = np.unique(u)
    candidates.extend((s[i] + s[i + 1]) / 2.0 for i in range(s.size - 1))
    best = -1
    for t in candidates:
        correct = int(np.sum((u > t) == is_pos))
        best = max(best, correct)
    return best


def test_best_threshold_is_optimal():
    rng = np.random.default_rng(13)
    for _ in range(200):
        n = int(rng.integers(2, 40))
        u = np.round(rng.normal(size=n), 2)  # force ties
        is_pos = rng.random(n) < 0.5
        t, correct = best_threshold(u, is_pos)
        assert correct == brute_force_best_threshold(u, is_pos)
        assert int(np.sum((u > t) == is_pos)) == correct


def test_classify_tie_goes_negative():
    m = model_of([1.0], t=0.5)
    assert classify([0.5], m) == "neg"
    assert classify([0.5 + 1e-9], m) == "pos"


def test_classify_matches_sign_oracle():
    rng = np.random.default_rng(14)
    m = model_of(rng.uniform(-1, 1, 6), t=0.3)
    for _ in range(1000):
        x = rng.uniform(0, 1, 6)
        expected = "pos" if float(x @ m.coefficients) - m.threshold > 0 else "neg"
        assert classify(x, m) == expected


def test_scale_canonicalization_invariance():
    rng = np.random.default_rng(15)
    coeffs = rng.uniform(-1, 1, 5)
    m1 = model_of(coeffs, t=0.2)
    scaled = LinearModel(
        coefficients=coeffs * 0.5,
        threshold=0.1,
        positive_class="pos",
        negative_class="neg",
    )
    for _ in range(500):
        x = rng.uniform(0, 1, 5)
        assert classify(x, m1) == classify(x, scaled)


# ---------------------------------------------------------------------------
# training


def test_train_separable_pair():
    d = make_dataset([[0.0, 0.0], [1.0, 1.0]], ["A", "B"])
    result = train(d)
    assert result.accuracy == 1.0
    assert classify([0.0, 0.0], result.model) == "A"
    assert classify([1.0, 1.0], result.model) == "B"
    assert np.max(np.abs(result.model.coefficients)) == pytest.approx(1.0)


def test_train_xor_cannot_exceed_three_quarters():
    d = make_dataset(
        [[0, 0], [1, 1], [0, 1], [1, 0]], ["A", "A", "B", "B"]
    )
    result = train(d)
    assert result.accuracy <= 0.75 + 1e-12


def test_train_rejects_single_class():
    d = make_dataset([[0.0], [1.0]], ["A", "A"])
    with pytest.raises(ModelError):
        train(d)


def test_train_deterministic_serialization():
    rng = np.random.default_rng(16)
    rows = rng.uniform(0, 1, (60, 5))
    labels = ["A" if r[0] + r[1] < 1.0 else "B" for r in rows]
    d = make_dataset(rows, labels)
    r1 = train(d, cfg=TrainConfig(seed=42))
    r2 = train(d, cfg=TrainConfig(seed=42))
    assert json.dumps(r1.model.to_json(), sort_keys=True) == json.dumps(
        r2.model.to_json(), sort_keys=True
    )
    r3 = train(d, cfg=TrainConfig(seed=43))
    assert r3.accuracy >= 0.9  # different seed still trains fine


def test_train_threshold_is_optimal_for_returned_direction():
    rng = np.random.default_rng(17)
    rows = rng.uniform(0, 1, (50, 4))
    labels = ["A" if r[0] < 0.5 else "B" for r in rows]
    d = make_dataset(rows, labels)
    result = train(d)
    u = d.rows @ result.model.coefficients
    is_pos = d.label_mask(result.model.positive_class)
    achieved = int(np.sum((u > result.model.threshold) == is_pos))
    assert achieved == brute_force_best_threshold(u, is_pos)


def test_wbc_training_reaches_reference_band(wbc_normalized):
    result = train(wbc_normalized, cfg=TrainConfig(seed=0))
    assert result.accuracy >= 0.95


# ---------------------------------------------------------------------------
# pruning


def test_prune_exact_zero_coefficient():
    d = make_dataset(
        [[0.0, 0.3, 0.0], [1.0, 0.7, 1.0], [0.1, 0.5, 0.0], [0.9, 0.1, 1.0]],
        ["A", "B", "A", "B"],
    )
    m = LinearModel(
        coefficients=np.array([1.0, 0.0, 0.5]),
        threshold=0.5,
        positive_class="B",
        negative_class="A",
        attribute_names=("x1", "x2", "x3"),
    )
    pruned, report = prune_and_refit(m, d, eps=0.1)
    assert report.removed == ("x2",)
    assert pruned.n_attributes == 2


def test_prune_eps_zero_is_identity():
    d = make_dataset([[0.0, 0.0], [1.0, 1.0]], ["A", "B"])
    m = train(d).model
    pruned, report = prune_and_refit(m, d, eps=0.0)
    assert report.removed == ()
    assert pruned.to_json() == m.to_json()


def test_prune_refuses_to_remove_everything():
    d = make_dataset([[0.0], [1.0]], ["A", "B"])
    m = model_of([0.01], pos="B", neg="A")
    with pytest.raises(ModelError):
        prune_and_refit(m, d, eps=0.5)


def test_prune_synthetic_noise_dimensions():
    rng = np.random.default_rng(18)
    n_rows = 120
    informative = rng.uniform(0, 1, (n_rows, 10))
    labels = ["B" if row.mean() > 0.5 else "A" for row in informative]
    # shift the informative block so the signal is strong but not degenerate
    informative = informative + 0.15 * (np.array([l == "B" for l in labels])[:, None])
    noise = rng.uniform(0, 1, (n_rows, 10))
    rows = np.clip(np.column_stack([informative, noise]), 0, 2)
    names = [f"sig{i}" for i in range(10)] + [f"noise{i}" for i in range(10)]
    d = make_dataset(rows, labels, names)
    result = train(d, cfg=TrainConfig(seed=5))
    pruned, report = prune_and_refit(result.model, d, eps=0.05, cfg=TrainConfig(seed=5))
    removed_noise = sum(1 for name in report.removed if name.startswith("noise"))
    assert removed_noise >= 8
    assert report.accuracy_before - report.accuracy_after <= 0.02


# ---------------------------------------------------------------------------
# explanations


def test_explain_single_changed_attribute():
    rows = [
        [0.1, 0.2, 0.3],
        [0.1, 0.9, 0.3],  # same as row 0 except attribute 2
        [0.9, 0.9, 0.9],
    ]
    d = make_dataset(rows, ["A", "A", "B"])
    # model classifies by x2 only: row 0 -> predicted B (wrong), row 1 -> A? no:
    m = LinearModel(
        coefficients=np.array([0.0, 1.0, 0.0]),
        threshold=0.5,
        positive_class="B",
        negative_class="A",
    )
    # row 1 query: u = 0.9 > 0.5 -> predicted B, true A (misclassified)
    diff = explain_misclassified(d.rows[1], "A", d, m, k=1)
    assert diff.neighbor_rows == (0,)
    assert diff.changed[0].tolist() == [False, True, False]
    assert diff.deltas[0][1] == pytest.approx(-0.7)


def test_explain_requires_misclassified_query():
    d = make_dataset([[0.0], [1.0]], ["A", "B"])
    m = model_of([1.0], t=0.5, pos="B", neg="A")
    with pytest.raises(ModelError):
        explain_misclassified([0.0], "A", d, m)


def test_explain_errors_without_correct_cases():
    d = make_dataset([[0.9], [1.0]], ["A", "B"])
    m = model_of([1.0], t=0.5, pos="B", neg="A")  # classifies everything B
    with pytest.raises(ModelError):
        explain_misclassified([0.9], "A", d, m, k=1)


def test_explain_neighbor_order_matches_brute_force(wbc_normalized):
    result = train(wbc_normalized, cfg=TrainConfig(seed=0))
    model = result.model
    predicted = classify_rows(wbc_normalized.rows, model)
    mis = [i for i, (p, l) in enumerate(zip(predicted, wbc_normalized.labels)) if p != l]
    assert mis, "calibrated dataset should have misclassifications"
    query = mis[0]
    true_class = wbc_normalized.labels[query]
    diff = explain_misclassified(
        wbc_normalized.rows[query], true_class, wbc_normalized, model, k=2
    )
    # brute-force oracle: all correctly classified same-class rows by distance
    candidates = [
        (float(np.linalg.norm(wbc_normalized.rows[i] - wbc_normalized.rows[query])), i)
        for i in range(wbc_normalized.n_rows)
        if wbc_normalized.labels[i] == true_class and predicted[i] == true_class
    ]
    candidates.sort()
    assert diff.neighbor_rows == tuple(i for _, i in candidates[:2])
    assert len(diff.neighbor_rows) == 2  # mirrors the two-neighbor display


def test_informativeness_is_coefficient_magnitude():
    m = model_of([0.6, -0.8, 0.0, 1.0])
    assert m.informativeness.tolist() == [0.6, 0.8, 0.0, 1.0]
