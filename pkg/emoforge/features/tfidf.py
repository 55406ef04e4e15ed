"""
TF-IDF weighting: raw counts times smoothed idf, L2-normalized.
"""
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Sequence

import numpy as np

from .vocab import SparseVector, Vocabulary, count_vectorize


@dataclass(frozen=True)
class TfidfModel:
    vocab: Vocabulary
    idf: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        return {"vocab": self.vocab.to_dict(), "idf": self.idf.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TfidfModel":
        return cls(Vocabulary.from_dict(data["vocab"]), np.asarray(data["idf"], dtype=np.float64))


def fit_tfidf(docs: Iterable[Sequence[str]], vocab: Vocabulary) -> TfidfModel:
    """idf[t] = ln((1 + N) / (1 + df[t])) + 1 over the given documents."""
    df = np.zeros(len(vocab), dtype=np.float64)
    n_docs = 0
    for doc in docs:
        n_docs += 1
        present = {vocab.index[t] for t in doc if t in vocab.index}
        if present:
            df[list(present)] += 1
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    return TfidfModel(vocab, idf)


def tfidf_transform(tokens: Sequence[str], model: TfidfModel) -> SparseVector:
    counts = count_vectorize(tokens, model.vocab)
    values = counts.values * model.idf[counts.indices]
    norm = np.sqrt(np.sum(values ** 2))
    if norm > 0:
        values = values / norm
    return SparseVector(counts.dim, counts.indices, values)
