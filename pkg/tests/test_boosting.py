"""
Tests for multiclass boosting.
"""
import json
import math

import numpy as np
import pytest

from emoforge.boosting import (BoostedEnsemble, alpha_from_error, boost_fit, boost_predict,
                               fit_emobang_ensemble, reweight, update_weights, weighted_error)
from emoforge.corpus import Corpus, EmotionLabel, Split, stratified_split
from emoforge.errors import BalancingError, BoostingError, PreconditionError, RoundRejectedError
from emoforge.learners.factory import fit_weak_learner
from emoforge.schemas.schema import BoostConfig, SplitSpec

pytestmark = pytest.mark.unit


class FixedPredictions:
    """Stand-in weak learner replaying a fixed prediction vector."""

    def __init__(self, predictions):
        self.predictions = np.asarray(predictions)

    def predict(self, X):
        return self.predictions


def stump_factory(X, y, w, seed):
    return fit_weak_learner("dt", X, y, w, hyper={"max_depth": 1}, seed=seed)


class TestStageWeights:
    """Test alpha_from_error, weighted_error and reweight."""

    def test_alpha_eight_classes(self):
        assert alpha_from_error(0.25, 8) == pytest.approx(math.log(3) + math.log(7))
        assert alpha_from_error(0.25, 8) == pytest.approx(3.044522, abs=1e-6)

    def test_alpha_binary(self):
        assert alpha_from_error(0.25, 2) == pytest.approx(math.log(3))

    def test_chance_level_rejected(self):
        with pytest.raises(RoundRejectedError) as exc_info:
            alpha_from_error(0.875, 8)
        assert exc_info.value.error == 0.875

    def test_just_better_than_chance(self):
        assert alpha_from_error(0.87, 8) > 0

    def test_zero_error_capped(self):
        assert alpha_from_error(0.0, 8) == pytest.approx(math.log(1e10))
        assert alpha_from_error(1e-30, 8) == pytest.approx(math.log(1e10))

    def test_invalid_error(self):
        with pytest.raises(PreconditionError):
            alpha_from_error(1.5, 8)

    def test_weighted_error(self):
        w = np.array([0.7, 0.1, 0.1, 0.1])
        y = np.array([0, 1, 2, 3])
        learner = FixedPredictions([0, 0, 0, 0])
        assert weighted_error(learner, np.zeros((4, 1)), y, w) == pytest.approx(0.3)

    def test_reweight(self):
        """Test one error at E = 1/4 ends with half the mass."""
        w = np.full(4, 0.25)
        correct = np.array([True, True, True, False])
        updated = reweight(w, correct, alpha_from_error(0.25, 2))
        assert np.allclose(updated, [1 / 6, 1 / 6, 1 / 6, 1 / 2])
        assert updated.sum() == pytest.approx(1.0)

    def test_update_weights_from_learner(self):
        """Test the learner-level update on the hand-computed four-sample case."""
        y = np.array([0, 1, 0, 1])
        learner = FixedPredictions([0, 1, 0, 0])
        updated = update_weights(np.full(4, 0.25), learner, np.zeros((4, 1)), y, math.log(3))
        assert np.max(np.abs(updated - [1 / 6, 1 / 6, 1 / 6, 1 / 2])) < 1e-12

    def test_reweight_needs_positive_alpha(self):
        with pytest.raises(PreconditionError):
            reweight(np.full(2, 0.5), np.array([True, False]), 0.0)


class TestBoostFit:
    """Test boost_fit."""

    def test_perfect_member_stops_early(self):
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        y = np.array([0, 0, 1, 1])
        ensemble = boost_fit(stump_factory, X, y, BoostConfig(rounds=10))
        assert len(ensemble.members) == 1
        assert ensemble.alphas[0] == pytest.approx(math.log(1e10))
        assert np.array_equal(ensemble.predict(X), y)

    def test_three_class_stumps(self):
        """Test three stumps jointly fit three intervals with hand-computed weights."""
        X = np.arange(9, dtype=float)[:, None]
        y = np.repeat([0, 1, 2], 3)
        ensemble = boost_fit(stump_factory, X, y, BoostConfig(rounds=3, num_classes=3))
        assert np.allclose(ensemble.alphas, [math.log(4), math.log(10), math.log(28)])
        errors = [int(np.sum(pred != y)) for pred in ensemble.staged_predict(X)]
        assert errors == [3, 3, 0]
        assert [d["status"] for d in ensemble.diagnostics] == ["accepted"] * 3

    def test_gives_up_after_rejections(self):
        y = np.array([0, 1, 2, 3])
        factory = lambda X, y, w, seed: FixedPredictions((y + 1) % 8)  # noqa: E731
        with pytest.raises(BoostingError) as exc_info:
            boost_fit(factory, np.zeros((4, 1)), y, BoostConfig(rounds=2, max_rejections=3))
        diagnostics = exc_info.value.diagnostics
        assert len(diagnostics) == 3
        assert all(d["status"] == "rejected" for d in diagnostics)
        assert len({d["seed"] for d in diagnostics}) == 3

    def test_rejected_round_is_retried(self):
        y = np.array([0, 1, 0, 1])
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        calls = []

        def factory(X, y, w, seed):
            calls.append(seed)
            if len(calls) == 1:
                return FixedPredictions(1 - y)
            return fit_weak_learner("dt", X, y, w, seed=seed)

        ensemble = boost_fit(factory, X, y, BoostConfig(rounds=1))
        assert len(ensemble.members) == 1
        assert [d["status"] for d in ensemble.diagnostics] == ["rejected", "accepted"]

    def test_single_class_rejected(self):
        with pytest.raises(PreconditionError):
            boost_fit(stump_factory, np.zeros((3, 1)), np.zeros(3, dtype=int))

    def test_seeded(self, rng):
        X = rng.normal(size=(20, 3))
        y = rng.integers(0, 3, size=20)

        def factory(X, y, w, seed):
            return fit_weak_learner("rf", X, y, w, {"n_trees": 2, "max_depth": 2}, seed)

        first = boost_fit(factory, X, y, BoostConfig(rounds=4, seed=7))
        second = boost_fit(factory, X, y, BoostConfig(rounds=4, seed=7))
        assert first.alphas == second.alphas
        assert [d["seed"] for d in first.diagnostics] == [d["seed"] for d in second.diagnostics]


class TestBoostedEnsemble:
    """Test ensemble prediction and persistence."""

    @pytest.fixture
    def ensemble(self):
        X = np.arange(9, dtype=float)[:, None]
        y = np.repeat([0, 1, 2], 3)
        return boost_fit(stump_factory, X, y, BoostConfig(rounds=3, num_classes=3)), X

    def test_needs_members(self):
        with pytest.raises(PreconditionError):
            BoostedEnsemble([])

    def test_positive_alphas(self):
        learner = fit_weak_learner("nb", np.eye(2), [0, 1])
        with pytest.raises(PreconditionError):
            BoostedEnsemble([(learner, 0.0)])

    def test_distribution_is_vote_share(self, ensemble):
        model, X = ensemble
        shares = model.predict_distribution(X)
        assert np.allclose(shares.sum(axis=1), 1.0)
        assert np.array_equal(np.argmax(shares, axis=1), model.predict(X))

    def test_tie_goes_to_lower_class(self):
        first = fit_weak_learner("dt", np.zeros((1, 1)), [3])
        second = fit_weak_learner("dt", np.zeros((1, 1)), [1])
        model = BoostedEnsemble([(first, 1.0), (second, 1.0)])
        assert boost_predict(model, np.zeros(1)) is EmotionLabel.from_index(1)

    def test_round_trip(self, ensemble):
        model, X = ensemble
        restored = BoostedEnsemble.from_dict(json.loads(json.dumps(model.to_dict())))
        assert restored.alphas == pytest.approx(model.alphas)
        assert np.array_equal(restored.predict(X), model.predict(X))
        assert restored.config.num_classes == 3


@pytest.mark.slow
class TestContextualEnsemble:
    """Test the frozen-encoder boosted ensemble."""

    @pytest.mark.parametrize("balance", [False, True])
    def test_fit(self, planted_corpus, text_pipeline, fast_settings, balance):
        corpus = stratified_split(planted_corpus, SplitSpec(seed=1))
        fit = fit_emobang_ensemble(corpus, text_pipeline, fast_settings, balance=balance)
        assert 1 <= len(fit.ensemble.members) <= fast_settings.boost.rounds
        assert fit.balanced is balance
        assert (fit.smote is not None) is balance
        predictions = fit.predict([text_pipeline.apply(s.text) for s in corpus.samples[:5]])
        assert predictions.shape == (5,)
        assert np.all((predictions >= 0) & (predictions < 8))

    def test_balancing_names_the_short_class(self, planted_corpus, text_pipeline, fast_settings):
        corpus = stratified_split(planted_corpus, SplitSpec(seed=1))
        fear_train = [s.id for s in corpus if s.label is EmotionLabel.FEAR and s.split is Split.TRAIN]
        corpus = Corpus(samples=tuple(s for s in corpus if s.id not in fear_train[1:]))
        with pytest.raises(BalancingError, match="fear"):
            fit_emobang_ensemble(corpus, text_pipeline, fast_settings, balance=True)
