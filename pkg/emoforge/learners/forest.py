"""
Random forest: weighted bootstrap resampling and per-split feature sampling.
"""
import logging
from typing import Any, Dict, List

import numpy as np

from ..schemas.schema import ForestHyper
from .base import WeakLearner, mean_normalized
from .tree import FittedTree, grow_tree, resolve_max_features

logger = logging.getLogger(__name__)


class RandomForestLearner(WeakLearner):
    """
    Tree t draws its own generator from ``[seed, t]``. With bootstrapping, each
    tree sees ``n`` rows drawn with probability proportional to weight and
    fits them unweighted; without it, each tree fits the weighted data.
    """

    kind = "random_forest"
    hyper_model = ForestHyper

    def _fit(self, X, y, w, val):
        hyper = self.hyper
        n = len(y)
        max_features = resolve_max_features(hyper.max_features, X.shape[1])
        probs = w / w.sum()
        self.trees: List[FittedTree] = []
        for t in range(hyper.n_trees):
            rng = np.random.default_rng([self.seed, t])
            if hyper.bootstrap:
                rows = rng.choice(n, size=n, replace=True, p=probs)
                Xt, yt, wt = X[rows], y[rows], np.ones(n)
            else:
                Xt, yt, wt = X, y, mean_normalized(w)
            arrays = grow_tree(Xt, yt, wt, self.num_classes, hyper.max_depth,
                               hyper.min_leaf_mass, max_features, rng)
            self.trees.append(FittedTree.from_arrays(arrays))
        logger.debug("random forest: %d trees, %d features per split", len(self.trees), max_features)

    def _predict_proba(self, X):
        total = np.zeros((len(X), self.num_classes))
        for tree in self.trees:
            total += tree.predict_proba(X)
        return total / len(self.trees)

    def state_dict(self) -> Dict[str, Any]:
        return {"trees": [tree.to_dict() for tree in self.trees]}

    def load_state(self, state: Dict[str, Any]) -> None:
        self.trees = [FittedTree.from_dict(t) for t in state["trees"]]
