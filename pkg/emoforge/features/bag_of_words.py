"""
Count and TF-IDF featurizers.
"""
import logging
from typing import Any, Dict, Optional, Sequence

import numpy as np

from ..schemas.schema import VocabConfig
from .base import Docs, Featurizer
from .tfidf import TfidfModel, fit_tfidf, tfidf_transform
from .vocab import Vocabulary, build_vocab, count_vectorize, stack_dense

logger = logging.getLogger(__name__)


class CountFeaturizer(Featurizer):
    """Raw term counts over the training vocabulary."""

    kind = "count"
    settings_models = {"vocab": VocabConfig}

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        super().__init__(config)
        self.vocab: Optional[Vocabulary] = None

    def fit(self, docs: Docs, labels: Optional[Sequence[int]] = None,
            val_docs: Optional[Docs] = None, val_labels: Optional[Sequence[int]] = None) -> "CountFeaturizer":
        self.vocab = build_vocab(docs, self.settings["vocab"].min_freq)
        self._fitted = True
        return self

    @property
    def dim(self) -> int:
        self._require_fitted()
        return len(self.vocab)

    def transform(self, docs: Docs) -> np.ndarray:
        self._require_fitted()
        matrix = stack_dense([count_vectorize(doc, self.vocab) for doc in docs])
        return matrix.reshape(len(docs), self.dim)

    def state_dict(self) -> Dict[str, Any]:
        return {"vocab": self.vocab.to_dict()}

    def load_state(self, state: Dict[str, Any]) -> None:
        self.vocab = Vocabulary.from_dict(state["vocab"])
        self._fitted = True


class TfidfFeaturizer(Featurizer):
    """L2-normalized TF-IDF vectors with smoothed idf."""

    kind = "tfidf"
    settings_models = {"vocab": VocabConfig}

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        super().__init__(config)
        self.model: Optional[TfidfModel] = None

    def fit(self, docs: Docs, labels: Optional[Sequence[int]] = None,
            val_docs: Optional[Docs] = None, val_labels: Optional[Sequence[int]] = None) -> "TfidfFeaturizer":
        vocab = build_vocab(docs, self.settings["vocab"].min_freq)
        self.model = fit_tfidf(docs, vocab)
        self._fitted = True
        return self

    @property
    def dim(self) -> int:
        self._require_fitted()
        return len(self.model.vocab)

    def transform(self, docs: Docs) -> np.ndarray:
        self._require_fitted()
        matrix = stack_dense([tfidf_transform(doc, self.model) for doc in docs])
        return matrix.reshape(len(docs), self.dim)

    def state_dict(self) -> Dict[str, Any]:
        return self.model.to_dict()

    def load_state(self, state: Dict[str, Any]) -> None:
        self.model = TfidfModel.from_dict(state)
        self._fitted = True
