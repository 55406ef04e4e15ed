"""
Word embeddings trained with skip-gram negative sampling.

Two flavours share one trainer:

* ``train_skipgram`` learns one input vector per vocabulary token.
* ``train_subword`` composes a token's input vector from its whole-word row
  plus the rows of its hashed character n-grams, so unseen tokens that share
  n-grams with the vocabulary still get a vector.

Bucket rows start at zero and only buckets reached by vocabulary n-grams are
materialized; any other bucket reads as zero.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DataFormatError, PersistenceError, PreconditionError, TrainingError
from ..schemas.schema import SkipGramConfig, SubwordConfig
from .vocab import Vocabulary

logger = logging.getLogger(__name__)

_FNV_OFFSET = 0x811C9DC5
_FNV_PRIME = 0x01000193


def fnv1a_32(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFF
    return h


def char_ngrams(token: str, n_min: int, n_max: int) -> List[str]:
    """All character n-grams of the bare token, shortest first."""
    return [token[i:i + n] for n in range(n_min, n_max + 1) for i in range(len(token) - n + 1)]


def ngram_buckets(token: str, n_min: int, n_max: int, buckets: int) -> List[int]:
    return [fnv1a_32(g.encode("utf-8")) % buckets for g in char_ngrams(token, n_min, n_max)]


@dataclass(frozen=True)
class SubwordSpec:
    n_min: int
    n_max: int
    buckets: int


@dataclass
class EmbeddingTable:
    """
    Token vectors over a vocabulary.

    ``vectors`` holds the whole-word rows. In subword mode ``bucket_ids``
    (sorted) and ``bucket_vectors`` hold the materialized n-gram rows.
    """
    vocab: Vocabulary
    vectors: np.ndarray
    subword: Optional[SubwordSpec] = None
    bucket_ids: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    bucket_vectors: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    loss_history: List[float] = field(default_factory=list)

    def __post_init__(self):
        if self.vectors.shape[0] != len(self.vocab):
            raise PreconditionError(
                f"embedding rows ({self.vectors.shape[0]}) != vocabulary size ({len(self.vocab)})")
        self._bucket_row = {int(b): i for i, b in enumerate(self.bucket_ids)}
        self._composed: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def bucket_vector(self, bucket: int) -> Optional[np.ndarray]:
        row = self._bucket_row.get(int(bucket))
        return None if row is None else self.bucket_vectors[row]

    def _ngram_sum(self, token: str) -> Tuple[np.ndarray, int]:
        total = np.zeros(self.dim, dtype=np.float64)
        hits = 0
        spec = self.subword
        for bucket in ngram_buckets(token, spec.n_min, spec.n_max, spec.buckets):
            vec = self.bucket_vector(bucket)
            if vec is not None:
                total += vec
                hits += 1
        return total, hits

    def vector(self, token: str) -> Optional[np.ndarray]:
        """The token's vector, or None when the table has nothing for it."""
        idx = self.vocab.get(token)
        if self.subword is None:
            return None if idx is None else self.vectors[idx]
        if idx is not None:
            return self.composed_vectors()[idx]
        total, hits = self._ngram_sum(token)
        return total if hits else None

    def composed_vectors(self) -> np.ndarray:
        """Final per-token vectors (whole-word row plus n-gram rows in subword mode)."""
        if self.subword is None:
            return self.vectors
        if self._composed is None:
            composed = self.vectors.astype(np.float64).copy()
            for i, token in enumerate(self.vocab.tokens):
                composed[i] += self._ngram_sum(token)[0]
            self._composed = composed
        return self._composed

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "vocab": self.vocab.to_dict(),
            "vectors": self.vectors.tolist(),
            "loss_history": list(self.loss_history),
        }
        if self.subword is not None:
            data["subword"] = {"n_min": self.subword.n_min, "n_max": self.subword.n_max,
                               "buckets": self.subword.buckets}
            data["bucket_ids"] = self.bucket_ids.tolist()
            data["bucket_vectors"] = self.bucket_vectors.tolist()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EmbeddingTable":
        vocab = Vocabulary.from_dict(data["vocab"])
        vectors = np.asarray(data["vectors"], dtype=np.float64).reshape(len(vocab), -1)
        subword = None
        bucket_ids = np.zeros(0, dtype=np.int64)
        bucket_vectors = np.zeros((0, vectors.shape[1]))
        if data.get("subword"):
            subword = SubwordSpec(**data["subword"])
            bucket_ids = np.asarray(data["bucket_ids"], dtype=np.int64)
            bucket_vectors = np.asarray(data["bucket_vectors"], dtype=np.float64).reshape(
                len(bucket_ids), vectors.shape[1])
        return cls(vocab, vectors, subword, bucket_ids, bucket_vectors,
                   [float(x) for x in data.get("loss_history", [])])


# -----------------------------
# Training
# -----------------------------
def _encode_docs(docs: Sequence[Sequence[str]], vocab: Vocabulary) -> List[np.ndarray]:
    return [np.array([vocab.index[t] for t in doc if t in vocab.index], dtype=np.int64)
            for doc in docs]


def _count_centers(ids: List[np.ndarray], window: int) -> int:
    if window <= 0:
        return 0
    return sum(len(doc) for doc in ids if len(doc) > 1)


def draw_negatives(rng: np.random.Generator, noise_cdf: np.ndarray, context: np.ndarray,
                   k: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Targets (context word, then k noise draws) per context position, their 0/1
    labels and a mask that switches off noise draws equal to the context word.
    """
    negatives = np.searchsorted(noise_cdf, rng.random((len(context), k)), side="right")
    negatives = np.minimum(negatives, len(noise_cdf) - 1)
    targets = np.concatenate([context[:, None], negatives], axis=1)
    labels = np.zeros(targets.shape)
    labels[:, 0] = 1.0
    active = np.ones(targets.shape)
    active[:, 1:] = negatives != context[:, None]
    return targets, labels, active


def _train_sgns(docs: Sequence[Sequence[str]], vocab: Vocabulary, config: SkipGramConfig,
                subword: Optional[SubwordSpec]) -> EmbeddingTable:
    if len(vocab) == 0:
        raise PreconditionError("cannot train embeddings on an empty vocabulary")
    ids = _encode_docs(docs, vocab)
    centers_per_epoch = _count_centers(ids, config.window)
    if centers_per_epoch == 0:
        raise TrainingError("no training pairs")

    rng = np.random.default_rng(config.seed)
    V, d = len(vocab), config.dim
    w_in = (rng.random((V, d)) - 0.5) / d
    w_out = np.zeros((V, d))

    noise = np.asarray(vocab.freq, dtype=np.float64) ** 0.75
    if noise.sum() <= 0:
        noise = np.ones(V)
    noise_cdf = np.cumsum(noise / noise.sum())
    noise_cdf[-1] = 1.0

    bucket_ids = np.zeros(0, dtype=np.int64)
    w_bucket = np.zeros((0, d))
    token_rows: List[np.ndarray] = []
    if subword is not None:
        per_token = [ngram_buckets(t, subword.n_min, subword.n_max, subword.buckets)
                     for t in vocab.tokens]
        bucket_ids = np.array(sorted({b for bs in per_token for b in bs}), dtype=np.int64)
        row_of = {int(b): i for i, b in enumerate(bucket_ids)}
        token_rows = [np.array([row_of[b] for b in bs], dtype=np.int64) for bs in per_token]
        w_bucket = np.zeros((len(bucket_ids), d))

    total_steps = centers_per_epoch * config.epochs
    min_lr = config.lr0 * config.min_lr_fraction
    step = 0
    history: List[float] = []
    k = config.negatives
    for epoch in range(1, config.epochs + 1):
        loss_sum, pair_count = 0.0, 0
        for doc in ids:
            n = len(doc)
            if n < 2:
                continue
            for c in range(n):
                lo, hi = max(0, c - config.window), min(n, c + config.window + 1)
                context = np.concatenate([doc[lo:c], doc[c + 1:hi]])
                lr = max(min_lr, config.lr0 * (1.0 - step / total_steps))
                step += 1
                if len(context) == 0:
                    continue
                targets, labels, active = draw_negatives(rng, noise_cdf, context, k)

                center = doc[c]
                h = w_in[center]
                if subword is not None and len(token_rows[center]):
                    h = h + w_bucket[token_rows[center]].sum(axis=0)
                out_rows = w_out[targets]
                scores = out_rows @ h
                sig = 1.0 / (1.0 + np.exp(-scores))
                # log-sigmoid of the signed score, stable for large |score|
                signed = np.where(labels > 0, scores, -scores)
                loss_sum += float(np.sum(np.logaddexp(0.0, -signed) * active))
                pair_count += len(context)

                g = (sig - labels) * active
                grad_h = np.einsum("ck,ckd->d", g, out_rows)
                np.add.at(w_out, targets.ravel(), -lr * g.ravel()[:, None] * h)
                w_in[center] -= lr * grad_h
                if subword is not None and len(token_rows[center]):
                    np.add.at(w_bucket, token_rows[center], -lr * grad_h)
        epoch_loss = loss_sum / max(pair_count, 1)
        if not np.isfinite(epoch_loss):
            raise TrainingError("embedding loss diverged", epoch=epoch)
        history.append(epoch_loss)
        logger.info("SGNS epoch %d/%d: loss=%.4f pairs=%d", epoch, config.epochs, epoch_loss, pair_count)

    return EmbeddingTable(vocab, w_in, subword, bucket_ids, w_bucket, history)


def train_skipgram(docs: Sequence[Sequence[str]], vocab: Vocabulary,
                   config: Optional[SkipGramConfig] = None) -> EmbeddingTable:
    return _train_sgns(docs, vocab, config or SkipGramConfig(), None)


def train_subword(docs: Sequence[Sequence[str]], vocab: Vocabulary,
                  config: Optional[SubwordConfig] = None) -> EmbeddingTable:
    config = config or SubwordConfig()
    spec = SubwordSpec(config.n_min, config.n_max, config.buckets)
    return _train_sgns(docs, vocab, config, spec)


def embed_sentence(tokens: Sequence[str], table: EmbeddingTable) -> np.ndarray:
    """Mean of the available token vectors, zeros when none is available."""
    found = [v for v in (table.vector(t) for t in tokens) if v is not None]
    if not found:
        return np.zeros(table.dim, dtype=np.float64)
    return np.mean(np.stack(found), axis=0)


def embed_tokens(tokens: Sequence[str], table: EmbeddingTable) -> Tuple[np.ndarray, np.ndarray]:
    """Per-token vectors (T, d) and availability mask (T,)."""
    out = np.zeros((len(tokens), table.dim), dtype=np.float64)
    mask = np.zeros(len(tokens), dtype=bool)
    for i, token in enumerate(tokens):
        vec = table.vector(token)
        if vec is not None:
            out[i] = vec
            mask[i] = True
    return out, mask


# -----------------------------
# Text import / export
# -----------------------------
def export_embeddings(table: EmbeddingTable, path: str) -> None:
    """Write "V d" then one "token v1 ... vd" line per token (composed vectors)."""
    vectors = table.composed_vectors()
    lines = [f"{len(table.vocab)} {table.dim}"]
    for token, row in zip(table.vocab.tokens, vectors):
        lines.append(token + " " + " ".join(repr(float(x)) for x in row))
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise PersistenceError(f"cannot write embeddings {path}: {exc}") from exc


def import_embeddings(path: str) -> EmbeddingTable:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise PersistenceError(f"cannot read embeddings {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataFormatError.from_decode(path, exc) from None
    if not lines:
        raise DataFormatError(f"{path}: empty embedding file", line=1)
    try:
        n_tokens, dim = (int(x) for x in lines[0].split())
    except ValueError:
        raise DataFormatError(f"{path}: header must be 'V d'", line=1) from None
    tokens: List[str] = []
    rows: List[List[float]] = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.rstrip().split(" ")
        if len(parts) != dim + 1:
            raise DataFormatError(f"{path}: expected token and {dim} values", line=line_no)
        try:
            rows.append([float(x) for x in parts[1:]])
        except ValueError:
            raise DataFormatError(f"{path}: non-numeric value", line=line_no) from None
        tokens.append(parts[0])
    if len(tokens) != n_tokens:
        raise DataFormatError(f"{path}: header announces {n_tokens} tokens, found {len(tokens)}")
    vectors = np.asarray(rows, dtype=np.float64).reshape(n_tokens, dim)
    if not np.all(np.isfinite(vectors)):
        raise DataFormatError(f"{path}: non-finite embedding value")
    return EmbeddingTable(Vocabulary.from_tokens(tokens), vectors)
