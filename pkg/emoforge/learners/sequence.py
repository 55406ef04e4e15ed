"""
Neural sequence learners (hybrid, lstm, rnn) behind the weak-learner interface.

Sequence features feed the network position by position; a plain feature
matrix is repeated over ``repeat_positions`` positions instead. The latter is
an interpretation for features that have no token order.
"""
import logging
from typing import Any, Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..features.base import SequenceFeatures
from ..neural.graph import ModelGraph
from ..neural.hybrid import classifier_specs
from ..neural.training import Dataset, predict_proba, train_supervised
from ..schemas.schema import HybridConfig, TrainConfig
from .base import Inputs, WeakLearner, mean_normalized

logger = logging.getLogger(__name__)


class SequenceLearnerHyper(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    network: HybridConfig = HybridConfig()
    train: TrainConfig = TrainConfig()


def _dataset(X: Inputs, y: np.ndarray, weights: Optional[np.ndarray] = None) -> Dataset:
    if isinstance(X, SequenceFeatures):
        return Dataset(X.values, y, weights, X.mask)
    return Dataset(X, y, weights)


class _SequenceLearner(WeakLearner):
    architecture = ""
    hyper_model = SequenceLearnerHyper

    def __init__(self, config: Optional[Dict[str, Any]] = None, seed: int = 0):
        super().__init__(config, seed)
        self.graph: Optional[ModelGraph] = None
        self.input_style: Optional[str] = None
        self.history = None

    def _check_inputs(self, X: Inputs) -> Inputs:
        if isinstance(X, SequenceFeatures):
            return X
        return super()._check_inputs(X)

    def _fit(self, X, y, w, val):
        self.input_style = "sequence" if isinstance(X, SequenceFeatures) else "vector"
        if self.input_style == "vector":
            logger.warning("%s over per-sentence vectors: input repeated over %d positions",
                           self.kind, self.hyper.network.repeat_positions)
        specs = classifier_specs(self.architecture, self.input_style, self.hyper.network,
                                 input_dim=self._input_width(X))
        graph = ModelGraph(specs, seed=self.seed,
                           config={"architecture": self.architecture, "input": self.input_style})
        train = _dataset(X, y, mean_normalized(w))
        val_set = _dataset(val[0], val[1]) if val is not None else train
        config = self.hyper.train.model_copy(update={"seed": self.seed})
        self.graph, self.history = train_supervised(graph, train, val_set, config)

    def _predict_proba(self, X):
        return predict_proba(self.graph, _dataset(X, np.zeros(len(X), dtype=np.int64)))

    def state_dict(self) -> Dict[str, Any]:
        return {"input_style": self.input_style, "graph": self.graph.to_dict()}

    def load_state(self, state: Dict[str, Any]) -> None:
        self.input_style = state["input_style"]
        self.graph = ModelGraph.from_dict(state["graph"])


class HybridLearner(_SequenceLearner):
    """Convolution, max-pooling and an LSTM over the input sequence."""
    kind = "hybrid"
    architecture = "hybrid"


class LstmLearner(_SequenceLearner):
    """Single LSTM layer over the input sequence."""
    kind = "lstm"
    architecture = "lstm"


class RnnLearner(_SequenceLearner):
    """Single tanh recurrent layer over the input sequence."""
    kind = "rnn"
    architecture = "rnn"
