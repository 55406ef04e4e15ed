"""
Feature extraction: vocabularies, count/TF-IDF vectors, word embeddings and
SMOTE balancing. Featurizer classes are created through ``features.factory``.
"""
from .base import Featurizer, SequenceFeatures
from .embeddings import (
    EmbeddingTable,
    embed_sentence,
    export_embeddings,
    import_embeddings,
    train_skipgram,
    train_subword,
)
from .smote import SmoteResult, smote_balance, smote_report, smote_resample
from .tfidf import TfidfModel, fit_tfidf, tfidf_transform
from .vocab import SparseVector, Vocabulary, build_vocab, count_vectorize

__all__ = [
    "EmbeddingTable",
    "Featurizer",
    "SequenceFeatures",
    "SmoteResult",
    "SparseVector",
    "TfidfModel",
    "Vocabulary",
    "build_vocab",
    "count_vectorize",
    "embed_sentence",
    "export_embeddings",
    "fit_tfidf",
    "import_embeddings",
    "smote_balance",
    "smote_report",
    "smote_resample",
    "tfidf_transform",
    "train_skipgram",
    "train_subword",
]
