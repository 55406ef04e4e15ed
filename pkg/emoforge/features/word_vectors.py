"""
Skip-gram and subword embedding featurizers.

``transform`` mean-pools token vectors into one sentence vector;
``transform_sequences`` keeps the vectors of the tokens the table covers, in
order, capped at ``max_len`` positions.
"""
import logging
from typing import Any, Dict, Optional, Sequence

import numpy as np

from ..schemas.schema import SequenceConfig, SkipGramConfig, SubwordConfig, VocabConfig
from .base import Docs, Featurizer, SequenceFeatures, pad_sequences
from .embeddings import EmbeddingTable, embed_sentence, embed_tokens, train_skipgram, train_subword
from .vocab import build_vocab

logger = logging.getLogger(__name__)


class _EmbeddingFeaturizer(Featurizer):
    sequential = True

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        super().__init__(config)
        self.table: Optional[EmbeddingTable] = None

    def _train(self, docs: Docs, vocab) -> EmbeddingTable:
        raise NotImplementedError

    def fit(self, docs: Docs, labels: Optional[Sequence[int]] = None,
            val_docs: Optional[Docs] = None, val_labels: Optional[Sequence[int]] = None) -> "_EmbeddingFeaturizer":
        vocab = build_vocab(docs, self.settings["vocab"].min_freq)
        self.table = self._train(docs, vocab)
        self._fitted = True
        return self

    @classmethod
    def from_table(cls, table: EmbeddingTable, config: Optional[Dict[str, Any]] = None) -> "_EmbeddingFeaturizer":
        """Wrap an already trained or imported table."""
        featurizer = cls(config)
        featurizer.table = table
        featurizer._fitted = True
        return featurizer

    @property
    def dim(self) -> int:
        self._require_fitted()
        return self.table.dim

    def transform(self, docs: Docs) -> np.ndarray:
        self._require_fitted()
        if not docs:
            return np.zeros((0, self.dim))
        return np.stack([embed_sentence(doc, self.table) for doc in docs])

    def transform_sequences(self, docs: Docs) -> SequenceFeatures:
        self._require_fitted()
        rows = []
        for doc in docs:
            vectors, mask = embed_tokens(doc, self.table)
            rows.append(vectors[mask])
        return pad_sequences(rows, self.dim, self.settings["sequence"].max_len)

    def state_dict(self) -> Dict[str, Any]:
        return self.table.to_dict()

    def load_state(self, state: Dict[str, Any]) -> None:
        self.table = EmbeddingTable.from_dict(state)
        self._fitted = True


class SkipGramFeaturizer(_EmbeddingFeaturizer):
    kind = "skipgram"
    settings_models = {"vocab": VocabConfig, "embedding": SkipGramConfig, "sequence": SequenceConfig}

    def _train(self, docs: Docs, vocab) -> EmbeddingTable:
        return train_skipgram(docs, vocab, self.settings["embedding"])


class SubwordFeaturizer(_EmbeddingFeaturizer):
    kind = "subword"
    settings_models = {"vocab": VocabConfig, "embedding": SubwordConfig, "sequence": SequenceConfig}

    def _train(self, docs: Docs, vocab) -> EmbeddingTable:
        return train_subword(docs, vocab, self.settings["embedding"])
