"""
Base class for featurizers.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Type

import numpy as np
from pydantic import BaseModel, ValidationError

from ..errors import PreconditionError, StateError
from .smote import flatten_sequences, unflatten_sequences

Docs = Sequence[Sequence[str]]


@dataclass
class SequenceFeatures:
    """Per-position feature vectors (n, T, d) with a (n, T) mask of real positions."""
    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        if self.values.ndim != 3 or self.mask.shape != self.values.shape[:2]:
            raise PreconditionError(f"sequence features need (n, T, d) values and an (n, T) mask, "
                                    f"got {self.values.shape} and {self.mask.shape}")

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[2]

    def flatten(self) -> np.ndarray:
        return flatten_sequences(self.values, self.mask)

    @classmethod
    def from_flat(cls, rows: np.ndarray, steps: int, dim: int) -> "SequenceFeatures":
        values, mask = unflatten_sequences(rows, steps, dim)
        return cls(values, mask)

    def subset(self, idx) -> "SequenceFeatures":
        return SequenceFeatures(self.values[idx], self.mask[idx])


def pad_sequences(rows: Sequence[np.ndarray], dim: int, max_len: int) -> SequenceFeatures:
    """Stack (T_i, d) arrays into one zero-padded block of at least one position."""
    steps = max(1, min(max_len, max((len(r) for r in rows), default=0)))
    values = np.zeros((len(rows), steps, dim), dtype=np.float64)
    mask = np.zeros((len(rows), steps), dtype=bool)
    for i, row in enumerate(rows):
        n = min(len(row), steps)
        values[i, :n] = row[:n]
        mask[i, :n] = True
    return SequenceFeatures(values, mask)


class Featurizer(ABC):
    """Abstract base class for featurizers."""

    kind: str = ""
    sequential: bool = False
    settings_models: Dict[str, Type[BaseModel]] = {}

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        """
        Initialize the featurizer.

        Args:
            config: Configuration dictionary; each key listed in
                ``settings_models`` is validated into its pydantic model
        """
        self.config = config or {}
        self.settings = self._validate(self.config)
        self._fitted = False

    def _validate(self, config: Dict[str, Any]) -> Dict[str, BaseModel]:
        unknown = set(config) - set(self.settings_models)
        if unknown:
            raise PreconditionError(f"{self.kind} featurizer: unknown config keys {sorted(unknown)}")
        try:
            return {key: model.model_validate(config.get(key, {}))
                    for key, model in self.settings_models.items()}
        except ValidationError as exc:
            raise PreconditionError(f"{self.kind} featurizer config: {exc.errors()[0]['msg']}") from None

    @property
    def fitted(self) -> bool:
        return self._fitted

    def _require_fitted(self) -> None:
        if not self._fitted:
            raise StateError(f"{self.kind} featurizer used before fit")

    @abstractmethod
    def fit(self, docs: Docs, labels: Optional[Sequence[int]] = None,
            val_docs: Optional[Docs] = None, val_labels: Optional[Sequence[int]] = None) -> "Featurizer":
        """
        Fit the featurizer on training documents.

        Args:
            docs: Training token sequences
            labels: Class indices (only supervised featurizers use them)
            val_docs: Validation token sequences for early stopping
            val_labels: Validation class indices

        Returns:
            The fitted featurizer
        """
        pass

    @abstractmethod
    def transform(self, docs: Docs) -> np.ndarray:
        """
        Map documents to one vector each.

        Args:
            docs: Token sequences

        Returns:
            (n, D) float64 matrix
        """
        pass

    def transform_sequences(self, docs: Docs) -> SequenceFeatures:
        """
        Map documents to per-position vectors (sequential featurizers only).
        """
        raise PreconditionError(f"{self.kind} features are not sequential")

    @property
    @abstractmethod
    def dim(self) -> int:
        """Dimension of the vectors ``transform`` produces."""
        pass

    @abstractmethod
    def state_dict(self) -> Dict[str, Any]:
        """Fitted state as plain JSON-compatible data."""
        pass

    @abstractmethod
    def load_state(self, state: Dict[str, Any]) -> None:
        """Restore fitted state produced by ``state_dict``."""
        pass

    def to_dict(self) -> Dict[str, Any]:
        self._require_fitted()
        return {"kind": self.kind, "config": self.get_config(), "state": self.state_dict()}

    def get_config(self) -> Dict[str, Any]:
        """
        Get current configuration.

        Returns:
            Resolved configuration dictionary
        """
        return {key: model.model_dump() for key, model in self.settings.items()}

    def update_config(self, config: Dict[str, Any]) -> None:
        """
        Update configuration.

        Args:
            config: New configuration values
        """
        merged = {**self.config, **config}
        self.settings = self._validate(merged)
        self.config = merged
