import math

import numpy as np
import pytest

from visrisk.datacube import DataCube
from visrisk.ewm import (
    EwmError,
    EwmModel,
    FitConfig,
    fit,
    gradient,
    log_likelihood,
    score,
)


def percentile_cube(entities, times, indicators, values, observed=None):
    values = np.asarray(values, dtype=float)
    if observed is None:
        observed = np.ones(values.shape, dtype=bool)
    return DataCube(tuple(entities), tuple(times), tuple(indicators),
                    values, np.asarray(observed, dtype=bool))


THREE_GROUPS = (
    ("domestic macroeconomic", ("g1",)),
    ("credit and asset imbalances", ("g2",)),
    ("global imbalances", ("g3",)),
)


def test_score_zero_model_gives_half():
    cube = percentile_cube("AB", ["2000", "2001"], ["g1", "g2", "g3"],
                           np.full((2, 2, 3), 50.0))
    model = EwmModel(THREE_GROUPS, {"g1": 0.0, "g2": 0.0, "g3": 0.0}, 0.0)
    series = score(model, cube)
    assert len(series.rows) == 4
    for row in series.rows:
        assert row.probability == 0.5 and row.score == 0.0


def test_score_hand_example():
    # group contributions 0.2, 0.3, -0.1 with zero bias
    values = np.array([[[40.0, 60.0, 50.0]]])
    cube = percentile_cube(["A"], ["2000"], ["g1", "g2", "g3"], values)
    model = EwmModel(THREE_GROUPS, {"g1": 0.5, "g2": 0.5, "g3": -0.2}, 0.0)
    row = score(model, cube).rows[0]
    assert row.contributions["domestic macroeconomic"] == pytest.approx(0.2)
    assert row.contributions["credit and asset imbalances"] == pytest.approx(0.3)
    assert row.contributions["global imbalances"] == pytest.approx(-0.1)
    assert row.score == pytest.approx(0.4)
    assert row.probability == pytest.approx(1.0 / (1.0 + math.exp(-0.4)))
    assert row.probability == pytest.approx(0.59869, abs=1e-5)


def test_decomposition_identity_is_exact():
    rng = np.random.default_rng(0)
    cube = percentile_cube("ABCD", [f"20{i:02d}" for i in range(6)],
                           ["a", "b", "c", "d", "e"],
                           rng.uniform(0, 100, size=(4, 6, 5)))
    groups = (("m", ("a", "b")), ("c", ("c", "d")), ("g", ("e",)))
    weights = {k: float(w) for k, w in zip("abcde", rng.normal(size=5))}
    model = EwmModel(groups, weights, bias=float(rng.normal()))
    for row in score(model, cube).rows:
        total = model.bias
        for name in ("m", "c", "g"):
            total += row.contributions[name]
        assert total == row.score  # bit-exact under ordered summation


def test_score_skips_and_flags_missing():
    observed = np.ones((1, 3, 2), dtype=bool)
    observed[0, 1, 0] = False
    cube = percentile_cube(["A"], ["2000", "2001", "2002"], ["a", "b"],
                           np.full((1, 3, 2), 50.0), observed)
    model = EwmModel((("all", ("a", "b")),), {"a": 1.0, "b": 1.0}, 0.0)
    series = score(model, cube)
    assert len(series.rows) == 2
    assert series.skipped == (("A", "2001", ("a",)),)


def test_score_unknown_indicator_is_named():
    cube = percentile_cube(["A"], ["2000"], ["a"], np.full((1, 1, 1), 50.0))
    model = EwmModel((("all", ("a", "zz")),), {"a": 1.0, "zz": 1.0}, 0.0)
    with pytest.raises(EwmError, match="zz"):
        score(model, cube)


def test_probability_monotone_in_positive_weight():
    model = EwmModel((("all", ("a",)),), {"a": 2.0}, -1.0)
    cube = percentile_cube(["A"], [str(2000 + i) for i in range(5)], ["a"],
                           np.linspace(0, 100, 5).reshape(1, 5, 1))
    probs = [r.probability for r in score(model, cube).rows]
    assert all(p < q for p, q in zip(probs, probs[1:]))


def test_group_partition_validated():
    with pytest.raises(EwmError, match="more than one group"):
        EwmModel((("g1", ("a",)), ("g2", ("a",))), {"a": 1.0}, 0.0)
    with pytest.raises(EwmError, match="disagree"):
        EwmModel((("g1", ("a",)),), {"a": 1.0, "b": 2.0}, 0.0)


def test_gradient_matches_central_differences():
    rng = np.random.default_rng(1)
    for _ in range(25):
        n, d = int(rng.integers(4, 30)), int(rng.integers(1, 6))
        features = rng.uniform(0, 1, size=(n, d))
        labels = (rng.random(n) < 0.5).astype(float)
        w = rng.normal(size=d)
        b = float(rng.normal())
        l2 = float(rng.uniform(0, 0.5))
        g_w, g_b = gradient(features, labels, w, b, l2)
        eps = 1e-6
        for j in range(d):
            bump = np.zeros(d)
            bump[j] = eps
            fd = (log_likelihood(features, labels, w + bump, b, l2)
                  - log_likelihood(features, labels, w - bump, b, l2)) / (2 * eps)
            assert abs(fd - g_w[j]) <= 1e-6 * max(1.0, abs(fd))
        fd_b = (log_likelihood(features, labels, w, b + eps, l2)
                - log_likelihood(features, labels, w, b - eps, l2)) / (2 * eps)
        assert abs(fd_b - g_b) <= 1e-6 * max(1.0, abs(fd_b))


def balanced_label_cube():
    # features exactly independent of labels: x=0 and x=100 blocks share the
    # same 30% base rate, so the MLE is intercept-only
    rows = []
    values, labels = [], {}
    entities = [f"E{i}" for i in range(20)]
    for i, e in enumerate(entities):
        x = 0.0 if i < 10 else 100.0
        y = 1 if (i % 10) < 3 else 0
        values.append([[x]])
        labels[(e, "2000")] = y
    cube = percentile_cube(entities, ["2000"], ["a"], np.array(values))
    return cube, labels


def test_fit_recovers_intercept_only_mle():
    cube, labels = balanced_label_cube()
    model = fit(cube, labels, FitConfig(learning_rate=1.0, iterations=4000, l2=0.0))
    assert abs(model.bias - math.log(0.3 / 0.7)) <= 1e-4
    assert abs(model.weights["a"]) <= 1e-4


def test_fit_gradient_vanishes_at_optimum():
    cube, labels = balanced_label_cube()
    cfg = FitConfig(learning_rate=1.0, iterations=8000, l2=0.01)
    model = fit(cube, labels, cfg)
    feats = np.array([[0.0]] * 10 + [[1.0]] * 10)
    ys = np.array([1.0 if i % 10 < 3 else 0.0 for i in range(20)])
    g_w, g_b = gradient(feats, ys, np.array([model.weights["a"]]), model.bias, cfg.l2)
    assert math.hypot(g_w[0], g_b) <= 1e-6


def test_fit_predictive_indicator_gets_positive_weight():
    entities = [f"E{i}" for i in range(12)]
    values = np.array([[[10.0]] if i < 6 else [[90.0]] for i in range(12)])
    cube = percentile_cube(entities, ["2000"], ["a"], values)
    labels = {(e, "2000"): (0 if i < 6 else 1) for i, e in enumerate(entities)}
    model = fit(cube, labels, FitConfig(learning_rate=0.5, iterations=3000, l2=0.1))
    assert np.isfinite(model.weights["a"]) and model.weights["a"] > 0


def test_fit_warns_on_separable_data_without_penalty():
    entities = [f"E{i}" for i in range(12)]
    values = np.array([[[10.0]] if i < 6 else [[90.0]] for i in range(12)])
    cube = percentile_cube(entities, ["2000"], ["a"], values)
    labels = {(e, "2000"): (0 if i < 6 else 1) for i, e in enumerate(entities)}
    with pytest.warns(RuntimeWarning, match="separable"):
        fit(cube, labels, FitConfig(learning_rate=5.0, iterations=20000, l2=0.0))


def test_fit_requires_both_classes():
    cube, labels = balanced_label_cube()
    all_ones = {k: 1 for k in labels}
    with pytest.raises(EwmError, match="positive and one negative"):
        fit(cube, all_ones, FitConfig(iterations=10))


def test_model_roundtrips_through_dict():
    model = EwmModel(THREE_GROUPS, {"g1": 0.5, "g2": -0.25, "g3": 1.5}, 0.125)
    again = EwmModel.from_dict(model.to_dict())
    assert again == model
