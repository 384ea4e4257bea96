import math

import numpy as np
import pytest

from hopeal.classifier import (
    LinearModel,
    ProbDist,
    TrainConfig,
    TfidfLogisticScorer,
    _gradient,
    _objective,
    _Design,
    predict,
    predict_proba,
    train,
    train_tfidf_scorer,
)
from hopeal.corpus import Label
from hopeal.features import sparse_vector

from helpers import labeled


def _random_instance(rng, n, d):
    X = []
    for _ in range(n):
        nnz = rng.integers(0, d + 1)
        idx = sorted(rng.choice(d, size=nnz, replace=False).tolist())
        vals = rng.normal(size=nnz)
        X.append(sparse_vector(zip(idx, vals), d))
    y = [Label.HOPE if rng.random() < 0.5 else Label.NOT_HOPE for _ in range(n)]
    # force both classes
    y[0] = Label.HOPE
    y[-1] = Label.NOT_HOPE
    return X, y


class TestProbDist:
    def test_valid(self):
        d = ProbDist(probs=(0.25, 0.75))
        assert d.p_not_hope == 0.25 and d.p_hope == 0.75

    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            ProbDist(probs=(0.6, 0.6))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            ProbDist(probs=(-0.2, 1.2))

    def test_tie_resolves_to_not_hope(self):
        assert ProbDist(probs=(0.5, 0.5)).predicted_label() is Label.NOT_HOPE


class TestTrainErrors:
    def test_single_class(self):
        X = [sparse_vector([(0, 1.0)], 1)] * 3
        with pytest.raises(ValueError, match="single class"):
            train(X, [Label.HOPE] * 3)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            train([sparse_vector([(0, 1.0)], 1)], [Label.HOPE, Label.NOT_HOPE])

    def test_dimension_mismatch(self):
        X = [sparse_vector([(0, 1.0)], 1), sparse_vector([(0, 1.0)], 2)]
        with pytest.raises(ValueError, match="dimension"):
            train(X, [Label.HOPE, Label.NOT_HOPE])

    def test_non_finite_values(self):
        X = [sparse_vector([(0, float("inf"))], 1), sparse_vector([(0, 1.0)], 1)]
        with pytest.raises(ValueError, match="non-finite"):
            train(X, [Label.HOPE, Label.NOT_HOPE])

    def test_empty(self):
        with pytest.raises(ValueError):
            train([], [])


class TestTrainConfig:
    def test_defaults(self):
        cfg = TrainConfig()
        assert cfg.lam == 1.0
        assert cfg.max_iters == 500
        assert cfg.grad_tol == 1e-6

    @pytest.mark.parametrize(
        "kwargs", [{"lam": -1.0}, {"max_iters": 0}, {"grad_tol": 0.0}]
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            TrainConfig(**kwargs)


class TestTrain:
    def test_separable_toy(self):
        X = [sparse_vector([(0, -1.0)], 1), sparse_vector([(0, 1.0)], 1)]
        y = [Label.NOT_HOPE, Label.HOPE]
        model = train(X, y, TrainConfig(lam=1.0))
        assert model.weights[0] > 0
        assert predict(model, X[0]) is Label.NOT_HOPE
        assert predict(model, X[1]) is Label.HOPE

    def test_all_zero_features_balanced(self):
        X = [sparse_vector([], 3), sparse_vector([], 3)]
        model = train(X, [Label.HOPE, Label.NOT_HOPE])
        assert np.all(model.weights == 0.0)
        assert model.bias == 0.0

    def test_monotone_descent(self):
        rng = np.random.default_rng(11)
        X, y = _random_instance(rng, 20, 8)
        trace = []
        train(X, y, TrainConfig(lam=0.1), trace=trace)
        assert len(trace) >= 2
        assert all(later <= earlier for earlier, later in zip(trace, trace[1:]))

    def test_bit_identical_runs(self):
        rng = np.random.default_rng(5)
        X, y = _random_instance(rng, 15, 6)
        m1 = train(X, y, TrainConfig(lam=0.5))
        m2 = train(X, y, TrainConfig(lam=0.5))
        assert np.array_equal(m1.weights, m2.weights)
        assert m1.bias == m2.bias

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        X, y = _random_instance(rng, 12, 5)
        design = _Design.from_vectors(X)
        signs = np.array([1.0 if lbl is Label.HOPE else -1.0 for lbl in y])
        lam = 0.3
        w = rng.normal(size=5)
        b = float(rng.normal())
        grad_w, grad_b = _gradient(design, signs, lam, w, b)
        step = 1e-5
        for j in range(5):
            e = np.zeros(5)
            e[j] = step
            fd = (
                _objective(design, signs, lam, w + e, b)
                - _objective(design, signs, lam, w - e, b)
            ) / (2 * step)
            assert grad_w[j] == pytest.approx(fd, rel=1e-5, abs=1e-8)
        fd_b = (
            _objective(design, signs, lam, w, b + step)
            - _objective(design, signs, lam, w, b - step)
        ) / (2 * step)
        assert grad_b == pytest.approx(fd_b, rel=1e-5, abs=1e-8)

    def test_regularization_shrinks_weights(self):
        rng = np.random.default_rng(13)
        X, y = _random_instance(rng, 30, 6)
        norms = [
            float(np.linalg.norm(train(X, y, TrainConfig(lam=lam)).weights))
            for lam in (0.01, 1.0, 100.0)
        ]
        assert norms[0] >= norms[1] >= norms[2]


class TestPredict:
    def test_zero_model_is_uniform(self):
        model = LinearModel(weights=np.zeros(2), bias=0.0, lam=1.0)
        dist = predict_proba(model, sparse_vector([(0, 1.0)], 2))
        assert dist.probs == (0.5, 0.5)
        assert predict(model, sparse_vector([(0, 1.0)], 2)) is Label.NOT_HOPE

    def test_sigmoid_value(self):
        model = LinearModel(weights=np.array([2.0]), bias=-1.0, lam=0.0)
        dist = predict_proba(model, sparse_vector([(0, 1.0)], 1))
        assert dist.p_hope == pytest.approx(0.731059, abs=1e-6)
        assert predict(model, sparse_vector([(0, 1.0)], 1)) is Label.HOPE

    def test_extreme_logits_stay_finite(self):
        model = LinearModel(weights=np.array([1000.0]), bias=0.0, lam=0.0)
        low = predict_proba(model, sparse_vector([(0, -1.0)], 1))
        high = predict_proba(model, sparse_vector([(0, 1.0)], 1))
        for dist in (low, high):
            assert all(math.isfinite(p) and 0.0 <= p <= 1.0 for p in dist.probs)
        assert low.p_hope < 1e-300 or low.p_hope == 0.0
        assert high.p_hope == 1.0 or high.p_hope > 1 - 1e-12

    def test_below_half_predicts_not_hope(self):
        model = LinearModel(weights=np.array([1.0]), bias=0.0, lam=0.0)
        assert predict(model, sparse_vector([(0, -0.04)], 1)) is Label.NOT_HOPE

    def test_dimension_mismatch(self):
        model = LinearModel(weights=np.zeros(2), bias=0.0, lam=1.0)
        with pytest.raises(ValueError):
            predict_proba(model, sparse_vector([(0, 1.0)], 3))


class TestScorer:
    def test_batch_equals_elementwise(self):
        items = [
            labeled("1", "good bright day", Label.HOPE),
            labeled("2", "bad dark day", Label.NOT_HOPE),
            labeled("3", "good future", Label.HOPE),
            labeled("4", "dark end", Label.NOT_HOPE),
        ]
        scorer = train_tfidf_scorer(items, TrainConfig(lam=0.1))
        docs = [it.doc for it in items]
        whole = scorer.score_batch(docs)
        singles = [scorer.score_batch([d])[0] for d in docs]
        assert [d.probs for d in whole] == [d.probs for d in singles]

    def test_scorer_carries_fingerprint(self):
        items = [
            labeled("1", "up", Label.HOPE),
            labeled("2", "down", Label.NOT_HOPE),
        ]
        scorer = train_tfidf_scorer(items)
        assert scorer.model.vectorizer_fingerprint == scorer.vectorizer.fingerprint()
        assert isinstance(scorer, TfidfLogisticScorer)


class TestModelSerialization:
    def test_round_trip(self):
        model = LinearModel(
            weights=np.array([0.5, -1.25]),
            bias=0.75,
            lam=2.0,
            vectorizer_fingerprint="abc123",
        )
        restored = LinearModel.from_json(model.to_json())
        assert np.array_equal(restored.weights, model.weights)
        assert restored.bias == model.bias
        assert restored.lam == model.lam
        assert restored.vectorizer_fingerprint == "abc123"

    def test_rejects_unknown_format(self):
        with pytest.raises(ValueError):
            LinearModel.from_json('{"format_version": 99}')
