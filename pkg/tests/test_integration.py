"""
Integration tests for the emotion detection toolkit.
"""
import itertools
from decimal import Decimal, localcontext

import numpy as np
import pytest

from emoforge.artifact import load_artifact, save_artifact, train_pipeline
from emoforge.boosting import BoostedEnsemble, boost_fit, boost_predict, fit_emobang_ensemble, reweight
from emoforge.corpus import (LABELS, Corpus, EmotionLabel, Sample, Source, Split, load_corpus, save_corpus,
                             stratified_split)
from emoforge.evalkit import balancing_report, evaluate_predictions, grid_csv, run_grid
from emoforge.learners.factory import fit_weak_learner
from emoforge.neural.losses import softmax
from emoforge.schemas.schema import (FEATURE_KINDS, MODEL_KINDS, BoostConfig, GridSpec, RunManifest, SplitSpec,
                                     resolve_config)
from emoforge.splits import prepare_splits
from emoforge.synthetic import planted_keyword_corpus, skewed_corpus

pytestmark = pytest.mark.integration


def stump_factory(X, y, w, seed):
    return fit_weak_learner("dt", X, y, w, hyper={"max_depth": 1}, seed=seed)


class TestSoftmaxPrecision:
    """Test softmax against high-precision evaluation."""

    def test_matches_decimal_reference(self, rng):
        logits = rng.normal(scale=5.0, size=(1000, 8))
        probs = softmax(logits)
        with localcontext() as ctx:
            ctx.prec = 50
            for row, got in zip(logits, probs):
                exps = [Decimal(float(v)).exp() for v in row]
                total = sum(exps)
                expected = np.array([float(e / total) for e in exps])
                assert np.max(np.abs(got - expected)) < 1e-12

    def test_shift_invariance(self, rng):
        logits = rng.normal(size=(1000, 8))
        shifts = rng.normal(scale=10.0, size=(1000, 1))
        assert np.max(np.abs(softmax(logits + shifts) - softmax(logits))) < 1e-12


class TestBoostingEndToEnd:
    """Test boosting against brute-force voting and on separable data."""

    @pytest.fixture
    def separable(self):
        X = np.arange(30, dtype=float)[:, None]
        y = np.repeat([0, 1, 2], 10)
        return X, y

    def test_vote_matches_brute_force(self):
        """Test the weighted vote on every input of a small enumerated instance."""
        X = np.array(list(itertools.product(range(3), repeat=2)), dtype=float)
        y = (X.sum(axis=1) % 3).astype(int)
        members = []
        for t in range(5):
            w = np.random.default_rng(t).random(len(y)) + 0.1
            members.append((fit_weak_learner("dt", X, y, w, {"max_depth": 1}, t), 0.3 + 0.4 * t))
        ensemble = BoostedEnsemble(members, BoostConfig(num_classes=3))
        for x in X:
            scores = [sum(alpha for h, alpha in members if h.predict(x[None, :])[0] == j) for j in range(3)]
            assert boost_predict(ensemble, x).index == int(np.argmax(scores))

    def test_weights_stay_normalized(self, rng):
        w = np.full(12, 1 / 12)
        for _ in range(20):
            w = reweight(w, rng.random(12) < 0.7, float(rng.uniform(0.1, 3.0)))
            assert abs(w.sum() - 1.0) < 1e-12

    def test_stumps_reach_zero_training_error(self, separable):
        X, y = separable
        ensemble = boost_fit(stump_factory, X, y, BoostConfig(rounds=20, num_classes=3))
        errors = [int(np.sum(pred != y)) for pred in ensemble.staged_predict(X)]
        assert 0 in errors
        accepted = [h for h, _ in ensemble.members]
        best_member = max(np.mean(h.predict(X) == y) for h in accepted)
        assert np.mean(ensemble.predict(X) == y) >= best_member

    def test_seeded_runs_agree(self, separable):
        X, y = separable
        first = boost_fit(stump_factory, X, y, BoostConfig(rounds=5, num_classes=3, seed=2))
        second = boost_fit(stump_factory, X, y, BoostConfig(rounds=5, num_classes=3, seed=2))
        assert first.to_dict() == second.to_dict()


class TestMetricsProperties:
    """Test metric invariants over many inputs."""

    def test_permutation_invariance(self, rng):
        truth = [LABELS[i] for i in rng.integers(0, 8, size=60)]
        pred = [LABELS[i] for i in rng.integers(0, 8, size=60)]
        reference = evaluate_predictions(truth, pred)
        for _ in range(100):
            order = rng.permutation(60)
            shuffled = evaluate_predictions([truth[i] for i in order], [pred[i] for i in order])
            assert shuffled.f1 == reference.f1
            assert shuffled.accuracy == reference.accuracy


class TestRoundTrips:
    """Test lossless persistence across randomized instances."""

    def test_corpus_round_trips(self, rng, tmp_path):
        words = ["আমি", "তুমি", "রাগ", "ভয়", "খুশি", "বই", "😊", "ক্ষ"]
        for instance in range(50):
            samples = []
            for i in range(int(rng.integers(0, 6))):
                votes = {f"a{j}": LABELS[int(rng.integers(8))] for j in range(int(rng.integers(0, 2)))}
                label = next(iter(votes.values())) if votes and rng.random() < 0.5 else None
                samples.append(Sample(
                    id=f"{instance}-{i}",
                    text=" ".join(words[k] for k in rng.integers(len(words), size=int(rng.integers(1, 5)))),
                    source=list(Source)[int(rng.integers(len(Source)))],
                    votes=votes,
                    label=label,
                    split=list(Split)[int(rng.integers(3))] if rng.random() < 0.5 else None,
                ))
            corpus = Corpus(samples=tuple(samples))
            path = str(tmp_path / f"c{instance}.jsonl")
            save_corpus(corpus, path)
            assert load_corpus(path) == corpus

    @pytest.mark.slow
    def test_model_round_trips(self, text_pipeline, fast_settings, tmp_path, rng):
        """Test every feature x model pair, then random pairs, across fresh corpora and seeds."""
        pairs = list(itertools.product(FEATURE_KINDS, MODEL_KINDS))
        pairs += [pairs[i] for i in rng.integers(len(pairs), size=50 - len(pairs))]
        for instance, (feature, model) in enumerate(pairs):
            seed = int(rng.integers(1000))
            corpus = stratified_split(planted_keyword_corpus([12] * 8, seed=seed), SplitSpec(seed=seed))
            docs = [text_pipeline.apply(s.text) for s in corpus.samples]
            pipeline = train_pipeline(corpus, text_pipeline, feature, model, fast_settings, seed=seed)
            first, second = tmp_path / f"{instance}-a.json", tmp_path / f"{instance}-b.json"
            save_artifact(pipeline, str(first), omit_timing=True)
            restored = load_artifact(str(first))
            save_artifact(restored, str(second), omit_timing=True)
            assert first.read_bytes() == second.read_bytes(), (feature, model)
            assert np.array_equal(restored.predict_docs(docs), pipeline.predict_docs(docs)), (feature, model)
            expected = pipeline.fitted.model.predict_distribution(pipeline.inputs_from_docs(docs))
            got = restored.fitted.model.predict_distribution(restored.inputs_from_docs(docs))
            assert np.allclose(got, expected, rtol=0, atol=1e-12), (feature, model)


@pytest.mark.slow
class TestSyntheticBenchmarks:
    """Seeded experiments on planted-keyword corpora."""

    def test_ensemble_beats_count_baseline(self, text_pipeline):
        corpus = stratified_split(planted_keyword_corpus([100] * 8, seed=0), SplitSpec(seed=0))
        settings = resolve_config(overrides={"boost": {"rounds": 5}})
        fit = fit_emobang_ensemble(corpus, text_pipeline, settings)
        test = prepare_splits(corpus, text_pipeline)[Split.TEST]
        truth = [EmotionLabel.from_index(int(i)) for i in test.labels]
        ensemble_f1 = evaluate_predictions(truth, [LABELS[i] for i in fit.predict(test.docs)]).f1

        baseline = run_grid(corpus, GridSpec(features=["count"], models=["nb"]), settings, text_pipeline)
        assert ensemble_f1 >= 0.90
        assert ensemble_f1 > baseline.rows[0].metrics.f1

    def test_smote_does_not_hurt_nb_recall(self, text_pipeline, fast_settings):
        corpus = stratified_split(skewed_corpus(seed=1), SplitSpec(seed=1))
        result = balancing_report(corpus, GridSpec(features=["count"], models=["nb"]),
                                  fast_settings, text_pipeline)
        assert result.deltas[0]["recall"] >= 0

    def test_full_grid_is_byte_identical(self, planted_corpus, text_pipeline, fast_settings):
        corpus = stratified_split(planted_corpus, SplitSpec(seed=3))
        manifest = RunManifest(tool_version="test", subcommand="grid", seeds={"grid": 9})
        outputs = [grid_csv(run_grid(corpus, GridSpec(seed=9), fast_settings, text_pipeline),
                            manifest, omit_timing=True) for _ in range(2)]
        assert outputs[0] == outputs[1]
        assert len(outputs[0].splitlines()) == 42
