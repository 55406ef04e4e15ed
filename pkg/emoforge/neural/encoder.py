"""
Contextual sentence encoder: token + position embeddings, self-attention
blocks and mean pooling over real positions.

The encoder is trained once on the task with a dropout + dense(8) head and
then frozen; its pooled output is the ``contextual`` feature space and the
fine-tuned head seeds the boosted softmax heads.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import PreconditionError
from ..schemas.schema import NUM_CLASSES, EncoderConfig, TrainConfig
from ..features.vocab import Vocabulary, build_vocab
from .graph import ModelGraph
from .layers import LayerSpec
from .training import Dataset, EpochRecord, TrainingHistory, predict_proba, train_supervised

logger = logging.getLogger(__name__)

PAD_ID = 0
UNK_ID = 1
CLS_ID = 2
RESERVED = 3


@dataclass(frozen=True)
class TokenIndexer:
    """Maps tokens to ids with PAD=0, UNK=1, CLS=2 reserved."""
    vocab: Vocabulary
    max_len: int

    @property
    def size(self) -> int:
        return len(self.vocab) + RESERVED

    def ids(self, tokens: Sequence[str]) -> List[int]:
        out = [CLS_ID]
        for token in tokens[: self.max_len - 1]:
            idx = self.vocab.get(token)
            out.append(UNK_ID if idx is None else idx + RESERVED)
        return out

    def encode(self, docs: Sequence[Sequence[str]], length: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """(n, T) id matrix and mask; T is the longest sequence unless ``length`` is given."""
        rows = [self.ids(doc) for doc in docs]
        steps = length or max((len(r) for r in rows), default=1)
        ids = np.full((len(rows), steps), PAD_ID, dtype=np.int64)
        for i, row in enumerate(rows):
            ids[i, :len(row)] = row[:steps]
        return ids, ids != PAD_ID

    def to_dict(self) -> Dict[str, Any]:
        return {"vocab": self.vocab.to_dict(), "max_len": self.max_len}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TokenIndexer":
        return cls(Vocabulary.from_dict(data["vocab"]), int(data["max_len"]))


def build_indexer(docs: Sequence[Sequence[str]], config: EncoderConfig) -> TokenIndexer:
    vocab = build_vocab(docs, config.min_freq)
    if config.vocab_size is not None:
        vocab = Vocabulary(tokens=vocab.tokens[:config.vocab_size], freq=vocab.freq[:config.vocab_size],
                           df=vocab.df[:config.vocab_size], n_docs=vocab.n_docs)
    return TokenIndexer(vocab, config.max_len)


def encoder_specs(config: EncoderConfig, vocab_size: int) -> List[LayerSpec]:
    specs = [LayerSpec(kind="embedding", vocab_size=vocab_size, units=config.model_dim,
                       max_len=config.max_len)]
    specs += [LayerSpec(kind="self_attention_block", model_dim=config.model_dim, heads=config.heads,
                        ff_dim=config.ff_dim) for _ in range(config.blocks)]
    specs.append(LayerSpec(kind="mean_pool"))
    specs.append(LayerSpec(kind="dropout", rate=config.head_dropout))
    specs.append(LayerSpec(kind="dense", input_dim=config.model_dim, units=NUM_CLASSES))
    return specs


class ContextualEncoder:
    """Indexer plus the full encoder graph (embedding ... mean_pool, dropout, dense)."""

    def __init__(self, indexer: TokenIndexer, graph: ModelGraph, config: EncoderConfig,
                 history: Optional[TrainingHistory] = None):
        self.indexer = indexer
        self.graph = graph
        self.config = config
        self.history = history or TrainingHistory()
        self.pool_index = graph.layer_index("mean_pool")

    @classmethod
    def build(cls, indexer: TokenIndexer, config: Optional[EncoderConfig] = None) -> "ContextualEncoder":
        config = config or EncoderConfig()
        graph = ModelGraph(encoder_specs(config, indexer.size), seed=config.seed,
                           config={"encoder": config.model_dump()})
        return cls(indexer, graph, config)

    @property
    def dim(self) -> int:
        return self.config.model_dim

    def head_params(self) -> Dict[str, np.ndarray]:
        """The fine-tuned classification head as {"W", "b"}."""
        dense = self.graph.layers[self.graph.layer_index("dense", last=True)]
        return {"W": dense.params["W"].copy(), "b": dense.params["b"].copy()}

    def dataset(self, docs: Sequence[Sequence[str]], labels: Optional[Sequence[int]] = None,
                length: Optional[int] = None) -> Dataset:
        ids, mask = self.indexer.encode(docs, length)
        labels = np.zeros(len(docs), dtype=np.int64) if labels is None else np.asarray(labels)
        return Dataset(ids, labels, mask=mask)

    def fit(self, docs: Sequence[Sequence[str]], labels: Sequence[int],
            val_docs: Sequence[Sequence[str]], val_labels: Sequence[int],
            train_config: Optional[TrainConfig] = None) -> "ContextualEncoder":
        if not docs:
            raise PreconditionError("encoder training needs at least one document")
        logger.info("Training contextual encoder on %d documents (%d parameters)",
                    len(docs), self.graph.parameter_count())
        _, self.history = train_supervised(self.graph, self.dataset(docs, labels),
                                           self.dataset(val_docs, val_labels), train_config)
        return self

    def _run(self, docs: Sequence[Sequence[str]], stop: int, length: Optional[int] = None,
             chunk: int = 256) -> Tuple[List[np.ndarray], List[np.ndarray]]:
        outputs, masks = [], []
        for start in range(0, len(docs), chunk):
            part = docs[start:start + chunk]
            ids, mask = self.indexer.encode(part, length)
            out, _ = self.graph.forward(ids, mask, mode="infer", stop=stop)
            outputs.append(out.astype(np.float64))
            masks.append(mask)
        return outputs, masks

    def encode(self, docs: Sequence[Sequence[str]]) -> np.ndarray:
        """Pooled sentence vectors, (n, model_dim)."""
        if not docs:
            return np.zeros((0, self.dim))
        outputs, _ = self._run(docs, self.pool_index + 1)
        return np.concatenate(outputs, axis=0)

    def encode_sequences(self, docs: Sequence[Sequence[str]]) -> Tuple[np.ndarray, np.ndarray]:
        """Per-position contextual vectors (n, T, model_dim) and mask, T = longest sequence."""
        ids, mask = self.indexer.encode(docs)
        outputs, _ = self._run(docs, self.pool_index, length=ids.shape[1])
        values = np.concatenate(outputs, axis=0) * mask[..., None]
        return values, mask

    def predict_proba(self, docs: Sequence[Sequence[str]]) -> np.ndarray:
        return predict_proba(self.graph, self.dataset(docs))

    def to_dict(self) -> Dict[str, Any]:
        return {"indexer": self.indexer.to_dict(), "config": self.config.model_dump(),
                "graph": self.graph.to_dict(), "history": self.history.to_list(),
                "best_epoch": self.history.best_epoch}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ContextualEncoder":
        history = TrainingHistory([EpochRecord(**e) for e in data.get("history", [])],
                                  int(data.get("best_epoch", 0)))
        return cls(TokenIndexer.from_dict(data["indexer"]), ModelGraph.from_dict(data["graph"]),
                   EncoderConfig.model_validate(data["config"]), history)


def encode_contextual(tokens: Sequence[str], encoder: ContextualEncoder) -> np.ndarray:
    """Pooled vector of one token sequence, padded to the encoder's max length."""
    ids, mask = encoder.indexer.encode([tokens], encoder.config.max_len)
    out, _ = encoder.graph.forward(ids, mask, mode="infer", stop=encoder.pool_index + 1)
    return out[0].astype(np.float64)
