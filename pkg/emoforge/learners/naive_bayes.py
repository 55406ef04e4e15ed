"""
Multinomial naive Bayes with additive smoothing and weighted counts.
"""
from typing import Any, Dict

import numpy as np

from ..schemas.schema import NaiveBayesHyper
from .base import WeakLearner


class NaiveBayesLearner(WeakLearner):
    """
    Priors come from weighted class mass and likelihoods from weighted feature
    totals. Weights are divided by the smallest positive weight, so a weight of
    2 counts exactly like a duplicated sample. Features are shifted by
    ``min(0, training minimum)`` so signed inputs stay non-negative.
    """

    kind = "naive_bayes"
    hyper_model = NaiveBayesHyper

    def _fit(self, X, y, w, val):
        wn = w / w[w > 0].min()
        self.offsets = np.minimum(X.min(axis=0), 0.0)
        shifted = X - self.offsets
        self.class_mass = np.zeros(self.num_classes)
        self.feature_mass = np.zeros((self.num_classes, X.shape[1]))
        for c in range(self.num_classes):
            rows = y == c
            if rows.any():
                self.class_mass[c] = wn[rows].sum()
                self.feature_mass[c] = wn[rows] @ shifted[rows]
        self._derive()

    def _derive(self) -> None:
        alpha = self.hyper.alpha
        present = self.class_mass > 0
        self.present = present
        with np.errstate(divide="ignore"):
            self.log_prior = np.where(present, np.log(self.class_mass / self.class_mass.sum()), -np.inf)
        smoothed = self.feature_mass + alpha
        self.log_likelihood = np.log(smoothed / smoothed.sum(axis=1, keepdims=True))

    def _predict_proba(self, X):
        shifted = np.maximum(X - self.offsets, 0.0)
        joint = shifted @ self.log_likelihood.T + self.log_prior
        joint = joint - joint[:, self.present].max(axis=1, keepdims=True)
        probs = np.where(self.present, np.exp(joint), 0.0)
        return probs / probs.sum(axis=1, keepdims=True)

    def state_dict(self) -> Dict[str, Any]:
        return {"offsets": self.offsets.tolist(), "class_mass": self.class_mass.tolist(),
                "feature_mass": self.feature_mass.tolist()}

    def load_state(self, state: Dict[str, Any]) -> None:
        self.offsets = np.asarray(state["offsets"], dtype=np.float64)
        self.class_mass = np.asarray(state["class_mass"], dtype=np.float64)
        self.feature_mass = np.asarray(state["feature_mass"], dtype=np.float64).reshape(
            self.num_classes, len(self.offsets))
        self._derive()
