"""
Sequence classifiers: the convolutional-recurrent hybrid and the single-layer
RNN/LSTM baselines that share its embedding and head sizes.

Each architecture accepts three input styles:

* ``tokens``   - id sequences through a learned embedding
* ``sequence`` - precomputed per-position vectors (n, T, d) with a mask
* ``vector``   - one vector per sentence, repeated over a fixed number of positions
"""
from typing import List, Literal, Optional, Sequence

import numpy as np

from ..errors import PreconditionError
from ..schemas.schema import HybridConfig
from .encoder import TokenIndexer
from .graph import ModelGraph
from .layers import LayerSpec
from .losses import softmax

Architecture = Literal["hybrid", "lstm", "rnn"]
InputStyle = Literal["tokens", "sequence", "vector"]


def classifier_specs(architecture: Architecture, input_style: InputStyle,
                     config: Optional[HybridConfig] = None, vocab_size: Optional[int] = None,
                     input_dim: Optional[int] = None) -> List[LayerSpec]:
    config = config or HybridConfig()
    specs: List[LayerSpec] = []
    if input_style == "tokens":
        if vocab_size is None:
            raise PreconditionError("token input needs a vocabulary size")
        specs.append(LayerSpec(kind="embedding", vocab_size=vocab_size, units=config.embedding_dim))
        width = config.embedding_dim
    else:
        if input_dim is None:
            raise PreconditionError(f"{input_style} input needs an input dimension")
        if input_style == "vector":
            specs.append(LayerSpec(kind="repeat", positions=config.repeat_positions))
        width = input_dim

    if architecture == "hybrid":
        specs += [
            LayerSpec(kind="conv1d", input_dim=width, filters=config.filters,
                      kernel_width=config.kernel_width, activation="relu"),
            LayerSpec(kind="max_pool1d", pool_width=config.pool_width),
            LayerSpec(kind="lstm_cell", input_dim=config.filters, units=config.hidden),
        ]
    elif architecture == "lstm":
        specs.append(LayerSpec(kind="lstm_cell", input_dim=width, units=config.hidden))
    elif architecture == "rnn":
        specs.append(LayerSpec(kind="rnn_cell", input_dim=width, units=config.hidden))
    else:
        raise PreconditionError(f"unknown architecture {architecture!r}")

    specs += [
        LayerSpec(kind="dropout", rate=config.dropout),
        LayerSpec(kind="dense", input_dim=config.hidden, units=config.num_classes),
    ]
    return specs


def build_hybrid(config: Optional[HybridConfig] = None, vocab_size: int = 1,
                 seed: Optional[int] = None, dtype=np.float32) -> ModelGraph:
    """Embedding -> conv1d(relu) -> max-pool -> LSTM -> dropout -> dense."""
    config = config or HybridConfig()
    return ModelGraph(classifier_specs("hybrid", "tokens", config, vocab_size=vocab_size),
                      seed=config.seed if seed is None else seed, dtype=dtype,
                      config={"architecture": "hybrid", "input": "tokens"})


def hybrid_forward(tokens: Sequence[str], model: ModelGraph, indexer: TokenIndexer) -> np.ndarray:
    """Class distribution (8 values) for one token sequence, inference mode."""
    ids, mask = indexer.encode([tokens])
    logits, _ = model.forward(ids, mask, mode="infer")
    return softmax(logits[0].astype(np.float64))
