"""
One-vs-rest linear SVM trained by per-sample SGD on the L2-regularized hinge loss.
"""
from typing import Any, Dict

import numpy as np

from ..neural.losses import softmax
from ..schemas.schema import SvmHyper
from .base import WeakLearner, mean_normalized


class LinearSvmLearner(WeakLearner):
    """Step size eta_t = eta0 / (1 + lam * eta0 * t); distributions are softmax(margins)."""

    kind = "linear_svm"
    hyper_model = SvmHyper

    def _fit(self, X, y, w, val):
        lam, eta0 = self.hyper.lam, self.hyper.eta0
        K = self.num_classes
        wn = mean_normalized(w)
        rng = np.random.default_rng(self.seed)
        W = np.zeros((K, X.shape[1]))
        b = np.zeros(K)
        signs = -np.ones((len(y), K))
        signs[np.arange(len(y)), y] = 1.0
        t = 0
        for _ in range(self.hyper.epochs):
            for i in rng.permutation(len(y)):
                eta = eta0 / (1.0 + lam * eta0 * t)
                t += 1
                x = X[i]
                s = signs[i]
                violated = s * (W @ x + b) < 1.0
                W *= 1.0 - eta * lam
                if violated.any():
                    step = eta * wn[i] * s[violated]
                    W[violated] += step[:, None] * x
                    b[violated] += step
        self.W, self.b = W, b

    def margins(self, X: np.ndarray) -> np.ndarray:
        return X @ self.W.T + self.b

    def _predict_proba(self, X):
        return softmax(self.margins(X))

    def state_dict(self) -> Dict[str, Any]:
        return {"W": self.W.tolist(), "b": self.b.tolist()}

    def load_state(self, state: Dict[str, Any]) -> None:
        self.W = np.asarray(state["W"], dtype=np.float64).reshape(self.num_classes, -1)
        self.b = np.asarray(state["b"], dtype=np.float64)
