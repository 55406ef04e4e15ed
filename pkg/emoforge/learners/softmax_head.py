"""
Softmax head weak learner: dropout -> dense(8) -> softmax over fixed input vectors.
"""
import logging
from typing import Any, Dict, Optional

import numpy as np

from ..errors import DimensionError
from ..neural.graph import ModelGraph
from ..neural.layers import LayerSpec
from ..neural.training import Dataset, predict_proba, train_supervised
from ..schemas.schema import SoftmaxHeadHyper
from .base import WeakLearner, mean_normalized

logger = logging.getLogger(__name__)


class SoftmaxHeadLearner(WeakLearner):
    """
    Trained with the sample-weighted cross-entropy. When ``init_params``
    ({"W", "b"}) is given the head starts from them plus seeded Gaussian
    jitter; otherwise from seeded Glorot initialization.
    """

    kind = "softmax_head"
    hyper_model = SoftmaxHeadHyper

    def __init__(self, config: Optional[Dict[str, Any]] = None, seed: int = 0,
                 init_params: Optional[Dict[str, np.ndarray]] = None):
        super().__init__(config, seed)
        self.init_params = init_params
        self.graph: Optional[ModelGraph] = None
        self.history = None

    def _build(self, width: int) -> ModelGraph:
        specs = [LayerSpec(kind="dropout", rate=self.hyper.dropout),
                 LayerSpec(kind="dense", input_dim=width, units=self.num_classes)]
        return ModelGraph(specs, seed=self.seed, config={"learner": self.kind})

    def _fit(self, X, y, w, val):
        graph = self._build(X.shape[1])
        if self.init_params is not None:
            W = np.asarray(self.init_params["W"], dtype=np.float64)
            if W.shape != (X.shape[1], self.num_classes):
                raise DimensionError(f"warm-start head has shape {W.shape}, expected "
                                     f"({X.shape[1]}, {self.num_classes})")
            rng = np.random.default_rng(self.seed)
            graph.set_params({
                "1.W": W + rng.normal(0.0, self.hyper.jitter, size=W.shape),
                "1.b": np.asarray(self.init_params["b"], dtype=np.float64)
                + rng.normal(0.0, self.hyper.jitter, size=self.num_classes),
            })
        train = Dataset(X, y, weights=mean_normalized(w))
        val_set = Dataset(val[0], val[1]) if val is not None else train
        config = self.hyper.train.model_copy(update={"seed": self.seed})
        self.graph, self.history = train_supervised(graph, train, val_set, config)

    def _predict_proba(self, X):
        return predict_proba(self.graph, Dataset(X, np.zeros(len(X), dtype=np.int64)))

    def state_dict(self) -> Dict[str, Any]:
        return {"graph": self.graph.to_dict()}

    def load_state(self, state: Dict[str, Any]) -> None:
        self.graph = ModelGraph.from_dict(state["graph"])
