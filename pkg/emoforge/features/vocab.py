"""
Vocabulary construction and bag-of-words count vectors.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from ..errors import DimensionError, PreconditionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Vocabulary:
    """Token/index maps plus document frequencies over ``n_docs`` documents."""
    tokens: List[str] = field(default_factory=list)
    freq: List[int] = field(default_factory=list)
    df: List[int] = field(default_factory=list)
    n_docs: int = 0
    index: Dict[str, int] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.index:
            object.__setattr__(self, "index", {t: i for i, t in enumerate(self.tokens)})

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def get(self, token: str) -> Optional[int]:
        return self.index.get(token)

    def to_dict(self) -> Dict[str, Any]:
        return {"tokens": list(self.tokens), "freq": list(self.freq),
                "df": list(self.df), "n_docs": self.n_docs}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Vocabulary":
        return cls(tokens=list(data["tokens"]), freq=[int(f) for f in data["freq"]],
                   df=[int(d) for d in data["df"]], n_docs=int(data["n_docs"]))

    @classmethod
    def from_tokens(cls, tokens: Sequence[str]) -> "Vocabulary":
        """A vocabulary with no corpus statistics (used for imported embeddings)."""
        return cls(tokens=list(tokens), freq=[0] * len(tokens), df=[0] * len(tokens), n_docs=0)


def build_vocab(docs: Iterable[Sequence[str]], min_freq: int = 1) -> Vocabulary:
    """Keep tokens seen at least ``min_freq`` times, most frequent first."""
    if min_freq < 1:
        raise PreconditionError("min_freq must be >= 1")
    freq: Counter = Counter()
    df: Counter = Counter()
    n_docs = 0
    for doc in docs:
        n_docs += 1
        freq.update(doc)
        df.update(set(doc))
    kept = sorted((t for t, c in freq.items() if c >= min_freq), key=lambda t: (-freq[t], t))
    logger.info("Vocabulary: %d of %d distinct tokens kept (min_freq=%d, %d docs)",
                len(kept), len(freq), min_freq, n_docs)
    return Vocabulary(tokens=kept, freq=[freq[t] for t in kept], df=[df[t] for t in kept],
                      n_docs=n_docs)


@dataclass(frozen=True)
class SparseVector:
    """Sorted (index, value) pairs of a ``dim``-dimensional vector, zeros not stored."""
    dim: int
    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise DimensionError("indices and values differ in length")
        if len(self.indices):
            if np.any(np.diff(self.indices) <= 0) or self.indices[-1] >= self.dim or self.indices[0] < 0:
                raise DimensionError("sparse indices must be strictly increasing and < dim")

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "SparseVector":
        idx = np.flatnonzero(dense)
        return cls(len(dense), idx.astype(np.int64), dense[idx].astype(np.float64))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.float64)
        out[self.indices] = self.values
        return out

    def items(self) -> List[tuple]:
        return [(int(i), float(v)) for i, v in zip(self.indices, self.values)]

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.values ** 2)))


def count_vectorize(tokens: Sequence[str], vocab: Vocabulary) -> SparseVector:
    counts = Counter(vocab.index[t] for t in tokens if t in vocab.index)
    idx = np.array(sorted(counts), dtype=np.int64)
    values = np.array([counts[i] for i in idx], dtype=np.float64)
    return SparseVector(len(vocab), idx, values)


def stack_dense(vectors: Sequence[SparseVector]) -> np.ndarray:
    """Rows of a dense (n, dim) matrix."""
    if not vectors:
        return np.zeros((0, 0))
    out = np.zeros((len(vectors), vectors[0].dim), dtype=np.float64)
    for row, vec in enumerate(vectors):
        out[row, vec.indices] = vec.values
    return out
