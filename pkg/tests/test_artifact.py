"""
Tests for trained pipelines and their JSON artifact.
"""
import json

import numpy as np
import pytest

from emoforge.artifact import (TrainedPipeline, input_style, is_interpretation, load_artifact,
                               save_artifact, strip_timing, train_pipeline)
from emoforge.boosting import BoostedEnsemble
from emoforge.corpus import EmotionLabel, stratified_split
from emoforge.errors import DataFormatError, PersistenceError, PreconditionError
from emoforge.features.factory import FeaturizerFactory
from emoforge.schemas.schema import RunManifest, SplitSpec

pytestmark = pytest.mark.unit


@pytest.fixture
def split_corpus(planted_corpus):
    return stratified_split(planted_corpus, SplitSpec(seed=4))


@pytest.fixture
def nb_pipeline(split_corpus, text_pipeline, fast_settings):
    manifest = RunManifest(tool_version="test", subcommand="train", seeds={"master": 0})
    return train_pipeline(split_corpus, text_pipeline, "count", "nb", fast_settings, manifest=manifest)


class TestWiring:
    """Test how models consume features."""

    def test_input_style(self, fast_settings):
        count = FeaturizerFactory.from_settings("count", fast_settings)
        skipgram = FeaturizerFactory.from_settings("skipgram", fast_settings)
        assert input_style(count, "lstm") == "vector"
        assert input_style(skipgram, "lstm") == "sequence"
        assert input_style(skipgram, "nb") == "vector"

    def test_interpretation(self, fast_settings):
        count = FeaturizerFactory.from_settings("count", fast_settings)
        contextual = FeaturizerFactory.from_settings("contextual", fast_settings)
        assert is_interpretation(count, "hybrid")
        assert is_interpretation(count, "ensemble")
        assert not is_interpretation(contextual, "ensemble")
        assert not is_interpretation(count, "svm")


class TestTrainPipeline:
    """Test train_pipeline and prediction."""

    def test_predicts_labels(self, nb_pipeline):
        label = nb_pipeline.predict_text("আমি খুব খুশি 😊")
        assert isinstance(label, EmotionLabel)

    def test_learns_planted_keywords(self, nb_pipeline, split_corpus):
        train = [s for s in split_corpus if s.split.value == "train"]
        predicted = nb_pipeline.predict_texts([s.text for s in train])
        # keyword pairs share a pool, so at least the pool must be right
        assert np.mean([p.index // 2 == s.label.index // 2 for p, s in zip(predicted, train)]) >= 0.9

    def test_distribution(self, nb_pipeline):
        dist = nb_pipeline.predict_distribution("রাগ ক্ষোভ")
        assert list(dist) == [label.value for label in EmotionLabel]
        assert sum(dist.values()) == pytest.approx(1.0)

    def test_unknown_model(self, split_corpus, text_pipeline, fast_settings):
        with pytest.raises(PreconditionError):
            train_pipeline(split_corpus, text_pipeline, "count", "knn", fast_settings)

    def test_needs_splits(self, planted_corpus, text_pipeline, fast_settings):
        with pytest.raises(PreconditionError, match="split"):
            train_pipeline(planted_corpus, text_pipeline, "count", "nb", fast_settings)

    def test_balanced_training(self, text_pipeline, fast_settings):
        from emoforge.synthetic import planted_keyword_corpus

        corpus = stratified_split(planted_keyword_corpus([16, 12, 10, 8, 8, 8, 8, 8], seed=3), SplitSpec())
        pipeline = train_pipeline(corpus, text_pipeline, "tfidf", "dt", fast_settings, balance=True)
        assert pipeline.balanced
        assert pipeline.fitted.smote_report["classes"]["anger"]["synthetic"] == 0
        assert pipeline.fitted.smote_report["synthetic_total"] > 0

    def test_sequence_model(self, split_corpus, text_pipeline, fast_settings):
        pipeline = train_pipeline(split_corpus, text_pipeline, "skipgram", "lstm", fast_settings)
        assert pipeline.fitted.input_style == "sequence"
        assert not pipeline.fitted.interpretation
        assert isinstance(pipeline.predict_text("আজ বৃষ্টি"), EmotionLabel)

    def test_ensemble_model(self, split_corpus, text_pipeline, fast_settings):
        pipeline = train_pipeline(split_corpus, text_pipeline, "tfidf", "ensemble", fast_settings)
        assert isinstance(pipeline.fitted.model, BoostedEnsemble)
        assert pipeline.fitted.interpretation


class TestArtifactFile:
    """Test save_artifact and load_artifact."""

    def test_round_trip(self, nb_pipeline, tmp_path):
        path = str(tmp_path / "model.json")
        save_artifact(nb_pipeline, path)
        restored = load_artifact(path)
        texts = ["রাগ ক্ষোভ আজ", "আনন্দ খুশি বাজার", ""]
        assert restored.predict_texts(texts) == nb_pipeline.predict_texts(texts)
        assert restored.manifest.digest() == nb_pipeline.manifest.digest()

    def test_round_trip_ensemble(self, split_corpus, text_pipeline, fast_settings, tmp_path):
        pipeline = train_pipeline(split_corpus, text_pipeline, "count", "ensemble", fast_settings)
        path = str(tmp_path / "model.json")
        save_artifact(pipeline, path)
        restored = load_artifact(path)
        docs = [text_pipeline.apply(s.text) for s in split_corpus.samples[:10]]
        assert np.array_equal(restored.predict_docs(docs), pipeline.predict_docs(docs))

    def test_omit_timing_is_byte_stable(self, nb_pipeline, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        save_artifact(nb_pipeline, str(first), omit_timing=True)
        save_artifact(nb_pipeline, str(second), omit_timing=True)
        assert first.read_bytes() == second.read_bytes()
        assert "timestamp" not in json.loads(first.read_text(encoding="utf-8"))["manifest"]

    def test_same_seed_same_bytes(self, split_corpus, text_pipeline, fast_settings, tmp_path):
        paths = []
        for name in ("a.json", "b.json"):
            pipeline = train_pipeline(split_corpus, text_pipeline, "tfidf", "rf", fast_settings, seed=6)
            paths.append(tmp_path / name)
            save_artifact(pipeline, str(paths[-1]), omit_timing=True)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_version_checked(self, nb_pipeline):
        data = nb_pipeline.to_dict()
        data["version"] = 999
        with pytest.raises(DataFormatError):
            TrainedPipeline.from_dict(data)

    def test_missing_field(self, nb_pipeline):
        data = nb_pipeline.to_dict()
        del data["model_code"]
        with pytest.raises(DataFormatError, match="model_code"):
            TrainedPipeline.from_dict(data)

    def test_not_json(self, write_lines):
        with pytest.raises(DataFormatError):
            load_artifact(write_lines("model.json", ["{not json"]))

    def test_missing_file(self, tmp_path):
        with pytest.raises(PersistenceError):
            load_artifact(str(tmp_path / "absent.json"))

    def test_strip_timing(self):
        data = {"seconds": 3.0, "rows": [{"seconds": 1.0, "f1": 0.5}]}
        assert strip_timing(data) == {"seconds": None, "rows": [{"seconds": None, "f1": 0.5}]}
