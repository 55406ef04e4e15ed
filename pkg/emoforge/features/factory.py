"""
Factory for creating featurizers.
"""
from typing import Any, Dict, Optional, Type

from ..errors import PreconditionError
from ..schemas.schema import EmoforgeConfig
from .bag_of_words import CountFeaturizer, TfidfFeaturizer
from .base import Featurizer
from .contextual import ContextualFeaturizer
from .word_vectors import SkipGramFeaturizer, SubwordFeaturizer


class FeaturizerFactory:
    """Factory class for creating featurizers."""

    _featurizers: Dict[str, Type[Featurizer]] = {
        "count": CountFeaturizer,
        "tfidf": TfidfFeaturizer,
        "skipgram": SkipGramFeaturizer,
        "subword": SubwordFeaturizer,
        "contextual": ContextualFeaturizer,
    }

    @classmethod
    def create_featurizer(cls, kind: str, config: Optional[Dict[str, Any]] = None) -> Featurizer:
        """
        Create a featurizer instance.

        Args:
            kind: Featurizer kind ('count', 'tfidf', 'skipgram', 'subword', 'contextual')
            config: Configuration dictionary for the featurizer

        Returns:
            Unfitted featurizer instance

        Raises:
            PreconditionError: If the kind is not registered
        """
        if kind not in cls._featurizers:
            available = ", ".join(cls._featurizers)
            raise PreconditionError(f"Unsupported feature kind: {kind}. Available: {available}")
        return cls._featurizers[kind](config)

    @classmethod
    def from_settings(cls, kind: str, settings: EmoforgeConfig) -> Featurizer:
        """
        Create a featurizer configured from the resolved configuration tree.
        """
        return cls.create_featurizer(kind, featurizer_config(kind, settings))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> Featurizer:
        """
        Rebuild a fitted featurizer from ``Featurizer.to_dict`` output.
        """
        featurizer = cls.create_featurizer(data["kind"], data.get("config"))
        featurizer.load_state(data["state"])
        return featurizer

    @classmethod
    def get_available_featurizers(cls) -> list:
        """
        Get list of available featurizer kinds.

        Returns:
            List of registered featurizer kinds
        """
        return list(cls._featurizers.keys())

    @classmethod
    def register_featurizer(cls, name: str, featurizer_class: Type[Featurizer]) -> None:
        """
        Register a new featurizer kind.

        Args:
            name: Name of the featurizer kind
            featurizer_class: Class that inherits from Featurizer
        """
        if not isinstance(featurizer_class, type) or not issubclass(featurizer_class, Featurizer):
            raise ValueError("Featurizer class must inherit from Featurizer")
        cls._featurizers[name] = featurizer_class

    @classmethod
    def get_featurizer_info(cls, kind: str) -> Dict[str, Any]:
        """
        Get information about a featurizer kind.

        Args:
            kind: Featurizer kind

        Returns:
            Dictionary with featurizer information
        """
        if kind not in cls._featurizers:
            return {"error": f"Featurizer {kind} not found"}
        featurizer_class = cls._featurizers[kind]
        return {
            "name": kind,
            "class": featurizer_class.__name__,
            "sequential": featurizer_class.sequential,
            "settings": sorted(featurizer_class.settings_models),
            "description": (featurizer_class.__doc__ or "").strip(),
        }


def featurizer_config(kind: str, settings: EmoforgeConfig) -> Dict[str, Any]:
    """Slice of the configuration tree a featurizer kind consumes."""
    vocab = settings.vocab.model_dump()
    sequence = {"max_len": settings.hybrid.max_len}
    return {
        "count": {"vocab": vocab},
        "tfidf": {"vocab": vocab},
        "skipgram": {"vocab": vocab, "embedding": settings.skipgram.model_dump(), "sequence": sequence},
        "subword": {"vocab": vocab, "embedding": settings.subword.model_dump(), "sequence": sequence},
        "contextual": {"encoder": settings.encoder.model_dump(), "train": settings.train.model_dump()},
    }.get(kind, {})
