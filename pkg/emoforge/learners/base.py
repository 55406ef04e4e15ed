"""
Base class for weak learners.
"""
import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Tuple, Type, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from ..errors import DimensionError, PreconditionError, StateError
from ..features.base import SequenceFeatures
from ..schemas.schema import NUM_CLASSES

logger = logging.getLogger(__name__)

Inputs = Union[np.ndarray, SequenceFeatures]
ValidationSet = Optional[Tuple[Inputs, np.ndarray]]


def check_weights(sample_weight: Optional[np.ndarray], n: int) -> np.ndarray:
    """Validate sample weights (ones when omitted)."""
    if sample_weight is None:
        return np.ones(n, dtype=np.float64)
    w = np.asarray(sample_weight, dtype=np.float64)
    if w.shape != (n,):
        raise PreconditionError(f"expected {n} sample weights, got shape {w.shape}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise PreconditionError("sample weights must be finite and non-negative")
    if w.sum() <= 0:
        raise PreconditionError("sample weights sum to zero")
    return w


def mean_normalized(w: np.ndarray) -> np.ndarray:
    return w / w.mean()


class WeakLearner(ABC):
    """Abstract base class for weak learners."""

    kind: str = ""
    hyper_model: Optional[Type[BaseModel]] = None

    def __init__(self, config: Optional[Dict[str, Any]] = None, seed: int = 0):
        """
        Initialize the learner.

        Args:
            config: Hyper-parameter dictionary, validated into ``hyper_model``
            seed: Seed for every random choice the learner makes
        """
        self.config = config or {}
        self.seed = int(seed)
        self.hyper = self._validate(self.config)
        self.num_classes = NUM_CLASSES
        self.n_features: Optional[int] = None
        self.constant_class: Optional[int] = None
        self._fitted = False

    def _validate(self, config: Dict[str, Any]) -> Optional[BaseModel]:
        if self.hyper_model is None:
            return None
        try:
            return self.hyper_model.model_validate(config)
        except ValidationError as exc:
            raise PreconditionError(f"{self.kind} hyper-parameters: {exc.errors()[0]['msg']}") from None

    @property
    def fitted(self) -> bool:
        return self._fitted

    @property
    def degenerate(self) -> bool:
        return self.constant_class is not None

    # -----------------------------
    # Input handling
    # -----------------------------
    def _check_inputs(self, X: Inputs) -> Inputs:
        if isinstance(X, SequenceFeatures):
            raise PreconditionError(f"{self.kind} learner expects one vector per sample")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise DimensionError(f"{self.kind} learner expects an (n, d) matrix, got shape {X.shape}")
        return X

    def _input_width(self, X: Inputs) -> int:
        return X.dim if isinstance(X, SequenceFeatures) else X.shape[1]

    # -----------------------------
    # Public interface
    # -----------------------------
    def fit(self, X: Inputs, y: np.ndarray, sample_weight: Optional[np.ndarray] = None,
            val: ValidationSet = None) -> "WeakLearner":
        """
        Fit on weighted samples.

        Args:
            X: Feature matrix (n, d) or sequence features for sequence learners
            y: Class indices in [0, 8)
            sample_weight: Non-negative weights, not all zero (uniform when omitted)
            val: Optional (X, y) validation pair for learners that early-stop

        Returns:
            The fitted learner

        Raises:
            PreconditionError: On mismatched lengths, bad labels or zero total weight
        """
        X = self._check_inputs(X)
        y = np.asarray(y, dtype=np.int64)
        n = len(X)
        if n == 0 or len(y) != n:
            raise PreconditionError(f"need matching, non-empty inputs ({n} samples, {len(y)} labels)")
        if y.min() < 0 or y.max() >= self.num_classes:
            raise PreconditionError(f"labels must lie in [0, {self.num_classes})")
        w = check_weights(sample_weight, n)
        self.n_features = self._input_width(X)

        present = np.unique(y[w > 0])
        if len(present) == 1:
            self.constant_class = int(present[0])
            logger.warning("%s learner saw a single class (%d); predicting it with certainty",
                           self.kind, self.constant_class)
        else:
            self.constant_class = None
            self._fit(X, y, w, val)
        self._fitted = True
        return self

    def predict_distribution(self, X: Inputs) -> np.ndarray:
        """
        Class distributions for one vector (-> (K,)) or a batch (-> (n, K)).

        Raises:
            DimensionError: If the feature width differs from training
        """
        if not self._fitted:
            raise StateError(f"{self.kind} learner used before fit")
        single = isinstance(X, np.ndarray) and X.ndim == 1
        if single:
            X = X[None, :]
        X = self._check_inputs(X)
        if self._input_width(X) != self.n_features:
            raise DimensionError(f"{self.kind} learner was fitted on width {self.n_features}, "
                                 f"got {self._input_width(X)}")
        if self.constant_class is not None:
            probs = np.zeros((len(X), self.num_classes))
            probs[:, self.constant_class] = 1.0
        else:
            probs = self._predict_proba(X)
        return probs[0] if single else probs

    def predict(self, X: Inputs) -> np.ndarray:
        return np.argmax(self.predict_distribution(X), axis=-1)

    @abstractmethod
    def _fit(self, X: Inputs, y: np.ndarray, w: np.ndarray, val: ValidationSet) -> None:
        """
        Fit the model on at least two classes.

        Args:
            X: Validated inputs
            y: Class indices
            w: Validated, unnormalized sample weights
            val: Optional validation pair
        """
        pass

    @abstractmethod
    def _predict_proba(self, X: Inputs) -> np.ndarray:
        """
        Class distributions for a validated batch.

        Returns:
            (n, K) array of rows summing to one
        """
        pass

    # -----------------------------
    # Persistence and configuration
    # -----------------------------
    @abstractmethod
    def state_dict(self) -> Dict[str, Any]:
        """Fitted parameters as JSON-compatible data."""
        pass

    @abstractmethod
    def load_state(self, state: Dict[str, Any]) -> None:
        """Restore parameters produced by ``state_dict``."""
        pass

    def to_dict(self) -> Dict[str, Any]:
        if not self._fitted:
            raise StateError(f"{self.kind} learner used before fit")
        return {
            "kind": self.kind,
            "config": self.get_config(),
            "seed": self.seed,
            "n_features": self.n_features,
            "constant_class": self.constant_class,
            "state": None if self.degenerate else self.state_dict(),
        }

    def restore(self, data: Dict[str, Any]) -> "WeakLearner":
        self.n_features = data.get("n_features")
        self.constant_class = data.get("constant_class")
        if self.constant_class is None:
            self.load_state(data["state"])
        self._fitted = True
        return self

    def get_config(self) -> Dict[str, Any]:
        """
        Get current configuration.

        Returns:
            Resolved hyper-parameter dictionary
        """
        return self.hyper.model_dump() if self.hyper is not None else dict(self.config)

    def update_config(self, config: Dict[str, Any]) -> None:
        """
        Update configuration.

        Args:
            config: New hyper-parameter values
        """
        merged = {**self.config, **config}
        self.hyper = self._validate(merged)
        self.config = merged
