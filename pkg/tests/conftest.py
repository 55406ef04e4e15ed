"""
Pytest configuration and fixtures.
"""
import os
from unittest.mock import patch

import numpy as np
import pytest

from emoforge.corpus import Corpus, EmotionLabel, Sample, Source
from emoforge.schemas.schema import resolve_config
from emoforge.synthetic import planted_keyword_corpus
from emoforge.textprep import TextPipeline


@pytest.fixture
def rng():
    """Seeded generator for test data."""
    return np.random.default_rng(1234)


@pytest.fixture
def toy_corpus():
    """Three labelled sentences and one unlabelled one."""
    return Corpus(samples=(
        Sample(id="s1", text="আমি খুব খুশি", source=Source.FACEBOOK, label=EmotionLabel.HAPPINESS),
        Sample(id="s2", text="এটা খুব দুঃখের খবর", source=Source.NEWS, label=EmotionLabel.SADNESS),
        Sample(id="s3", text="তুমি কেন এমন করলে", source=Source.TWITTER, label=EmotionLabel.ANGER,
               votes={"a1": EmotionLabel.ANGER, "a2": EmotionLabel.ANGER, "a3": EmotionLabel.FEAR}),
        Sample(id="s4", text="দাম ৫০০ টাকা", source=Source.ECOMMERCE),
    ))


@pytest.fixture
def planted_corpus():
    """Small balanced planted-keyword corpus (12 sentences per class)."""
    return planted_keyword_corpus([12] * 8, seed=5)


@pytest.fixture
def text_pipeline():
    return TextPipeline.from_paths()


@pytest.fixture
def fast_settings():
    """Configuration shrunk so every featurizer and model trains in seconds."""
    return resolve_config(overrides={
        "skipgram": {"dim": 8, "epochs": 2, "window": 2, "negatives": 2},
        "subword": {"dim": 8, "epochs": 2, "window": 2, "negatives": 2, "buckets": 2048},
        "encoder": {"max_len": 16, "model_dim": 8, "heads": 2, "blocks": 1, "ff_dim": 16},
        "hybrid": {"embedding_dim": 8, "filters": 4, "hidden": 4, "max_len": 16, "repeat_positions": 4},
        "train": {"max_epochs": 3, "batch_size": 16, "patience": 2},
        "head_train": {"max_epochs": 2, "batch_size": 16},
        "learners": {
            "rf": {"n_trees": 5, "max_depth": 6},
            "dt": {"max_depth": 8},
            "svm": {"epochs": 3},
            "head": {"train": {"max_epochs": 3, "batch_size": 16}},
        },
        "smote": {"k": 3},
        "boost": {"rounds": 3},
    })


@pytest.fixture
def write_lines(tmp_path):
    """Write UTF-8 lines to a file under tmp_path and return its path."""
    def _write(name, lines):
        path = tmp_path / name
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        return str(path)
    return _write


@pytest.fixture(autouse=True)
def mock_environment():
    """Pin environment variables the toolkit reads."""
    with patch.dict(os.environ, {"SOURCE_DATE_EPOCH": "1700000000"}):
        os.environ.pop("EMOFORGE_SEED", None)
        os.environ.pop("EMOFORGE_LOG_LEVEL", None)
        yield
