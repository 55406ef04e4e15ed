"""
Contextual featurizer backed by the self-attention encoder.
"""
import logging
from typing import Any, Dict, Optional, Sequence

import numpy as np

from ..errors import PreconditionError
from ..schemas.schema import EncoderConfig, TrainConfig
from ..neural.encoder import ContextualEncoder, build_indexer
from .base import Docs, Featurizer, SequenceFeatures

logger = logging.getLogger(__name__)


class ContextualFeaturizer(Featurizer):
    """
    Trains the encoder once on the labelled training split (early stopping on
    the validation split, or on the training split when none is given) and
    then serves frozen pooled vectors and per-position sequences.
    """

    kind = "contextual"
    sequential = True
    settings_models = {"encoder": EncoderConfig, "train": TrainConfig}

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        super().__init__(config)
        self.encoder: Optional[ContextualEncoder] = None

    def fit(self, docs: Docs, labels: Optional[Sequence[int]] = None,
            val_docs: Optional[Docs] = None, val_labels: Optional[Sequence[int]] = None) -> "ContextualFeaturizer":
        if labels is None:
            raise PreconditionError("the contextual encoder is trained on labels; none given")
        if val_docs is None or not len(val_docs):
            val_docs, val_labels = docs, labels
        indexer = build_indexer(docs, self.settings["encoder"])
        self.encoder = ContextualEncoder.build(indexer, self.settings["encoder"])
        self.encoder.fit(docs, labels, val_docs, val_labels, self.settings["train"])
        self._fitted = True
        return self

    @property
    def dim(self) -> int:
        return self.settings["encoder"].model_dim

    def transform(self, docs: Docs) -> np.ndarray:
        self._require_fitted()
        return self.encoder.encode(docs)

    def transform_sequences(self, docs: Docs) -> SequenceFeatures:
        self._require_fitted()
        values, mask = self.encoder.encode_sequences(docs)
        return SequenceFeatures(values, mask)

    def head_params(self) -> Dict[str, np.ndarray]:
        self._require_fitted()
        return self.encoder.head_params()

    def state_dict(self) -> Dict[str, Any]:
        return self.encoder.to_dict()

    def load_state(self, state: Dict[str, Any]) -> None:
        self.encoder = ContextualEncoder.from_dict(state)
        self._fitted = True
