"""
Factory for creating weak learners.
"""
from typing import Any, Dict, Optional, Type

import numpy as np

from ..errors import PreconditionError
from ..schemas.schema import EmoforgeConfig
from .base import Inputs, ValidationSet, WeakLearner
from .forest import RandomForestLearner
from .naive_bayes import NaiveBayesLearner
from .sequence import HybridLearner, LstmLearner, RnnLearner
from .softmax_head import SoftmaxHeadLearner
from .svm import LinearSvmLearner
from .tree import DecisionTreeLearner

# grid / command-line model codes -> learner kinds
MODEL_CODES = {
    "nb": "naive_bayes",
    "dt": "decision_tree",
    "rf": "random_forest",
    "svm": "linear_svm",
    "rnn": "rnn",
    "lstm": "lstm",
    "hybrid": "hybrid",
}


class LearnerFactory:
    """Factory class for creating weak learners."""

    _learners: Dict[str, Type[WeakLearner]] = {
        "naive_bayes": NaiveBayesLearner,
        "decision_tree": DecisionTreeLearner,
        "random_forest": RandomForestLearner,
        "linear_svm": LinearSvmLearner,
        "softmax_head": SoftmaxHeadLearner,
        "rnn": RnnLearner,
        "lstm": LstmLearner,
        "hybrid": HybridLearner,
    }

    @classmethod
    def create_learner(cls, kind: str, config: Optional[Dict[str, Any]] = None, seed: int = 0,
                       **kwargs: Any) -> WeakLearner:
        """
        Create an unfitted learner.

        Args:
            kind: Learner kind ('naive_bayes', 'decision_tree', 'random_forest',
                'linear_svm', 'softmax_head', 'rnn', 'lstm', 'hybrid')
            config: Hyper-parameters for the learner
            seed: Seed for the learner's random choices

        Returns:
            Learner instance

        Raises:
            PreconditionError: If the kind is not registered
        """
        kind = MODEL_CODES.get(kind, kind)
        if kind not in cls._learners:
            available = ", ".join(cls._learners)
            raise PreconditionError(f"Unsupported learner kind: {kind}. Available: {available}")
        return cls._learners[kind](config, seed, **kwargs)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> WeakLearner:
        """
        Rebuild a fitted learner from ``WeakLearner.to_dict`` output.
        """
        learner = cls.create_learner(data["kind"], data.get("config"), data.get("seed", 0))
        return learner.restore(data)

    @classmethod
    def get_available_learners(cls) -> list:
        """
        Get list of available learner kinds.

        Returns:
            List of registered learner kinds
        """
        return list(cls._learners.keys())

    @classmethod
    def register_learner(cls, name: str, learner_class: Type[WeakLearner]) -> None:
        """
        Register a new learner kind.

        Args:
            name: Name of the learner kind
            learner_class: Class that inherits from WeakLearner
        """
        if not isinstance(learner_class, type) or not issubclass(learner_class, WeakLearner):
            raise ValueError("Learner class must inherit from WeakLearner")
        cls._learners[name] = learner_class

    @classmethod
    def get_learner_info(cls, kind: str) -> Dict[str, Any]:
        """
        Get information about a learner kind.

        Args:
            kind: Learner kind or model code

        Returns:
            Dictionary with learner information
        """
        kind = MODEL_CODES.get(kind, kind)
        if kind not in cls._learners:
            return {"error": f"Learner {kind} not found"}
        learner_class = cls._learners[kind]
        return {
            "name": kind,
            "class": learner_class.__name__,
            "hyper_parameters": (learner_class.hyper_model().model_dump()
                                 if learner_class.hyper_model else {}),
            "description": (learner_class.__doc__ or "").strip(),
        }


def learner_config(kind: str, settings: EmoforgeConfig) -> Dict[str, Any]:
    """Hyper-parameters a learner kind reads from the configuration tree."""
    kind = MODEL_CODES.get(kind, kind)
    learners = settings.learners
    sequence = {"network": settings.hybrid.model_dump(), "train": settings.train.model_dump()}
    return {
        "naive_bayes": learners.nb.model_dump(),
        "decision_tree": learners.dt.model_dump(),
        "random_forest": learners.rf.model_dump(),
        "linear_svm": learners.svm.model_dump(),
        "softmax_head": learners.head.model_dump(),
        "rnn": sequence,
        "lstm": sequence,
        "hybrid": sequence,
    }.get(kind, {})


def fit_weak_learner(kind: str, X: Inputs, y: np.ndarray, w: Optional[np.ndarray] = None,
                     hyper: Optional[Dict[str, Any]] = None, seed: int = 0,
                     val: ValidationSet = None, **kwargs: Any) -> WeakLearner:
    """Create and fit a learner in one call."""
    return LearnerFactory.create_learner(kind, hyper, seed, **kwargs).fit(X, y, w, val)


def predict_distribution(learner: WeakLearner, x: Inputs) -> np.ndarray:
    return learner.predict_distribution(x)
