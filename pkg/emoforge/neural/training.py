"""
Mini-batch training with Adam and early stopping on validation loss.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..errors import NumericError, PreconditionError, TrainingError
from ..schemas.schema import TrainConfig
from .graph import ModelGraph
from .losses import softmax, softmax_cross_entropy
from .optim import AdamState, adam_step

logger = logging.getLogger(__name__)

INFER_BATCH = 256


@dataclass
class Dataset:
    """
    Inputs (ids (n, T), sequences (n, T, d) or vectors (n, D)) with labels,
    optional sample weights and an optional (n, T) mask.
    """
    inputs: np.ndarray
    labels: np.ndarray
    weights: Optional[np.ndarray] = None
    mask: Optional[np.ndarray] = None

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if len(self.inputs) != len(self.labels):
            raise PreconditionError(f"{len(self.inputs)} inputs but {len(self.labels)} labels")
        if self.weights is not None and len(self.weights) != len(self.labels):
            raise PreconditionError("weights and labels differ in length")

    def __len__(self) -> int:
        return len(self.labels)

    def batch(self, idx: np.ndarray) -> Tuple[np.ndarray, Optional[np.ndarray], np.ndarray, Optional[np.ndarray]]:
        """Rows ``idx`` with padding trimmed to the longest real sequence among them."""
        inputs = self.inputs[idx]
        mask = None if self.mask is None else self.mask[idx]
        if mask is not None and mask.shape[1]:
            longest = max(int(mask.sum(axis=1).max()), 1)
            inputs, mask = inputs[:, :longest], mask[:, :longest]
        weights = None if self.weights is None else self.weights[idx]
        return inputs, mask, self.labels[idx], weights


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    seconds: float

    def to_dict(self) -> Dict[str, float]:
        return {"epoch": self.epoch, "train_loss": self.train_loss,
                "val_loss": self.val_loss, "seconds": self.seconds}


@dataclass
class EarlyStopping:
    """Stop once validation loss has not improved for ``patience`` epochs."""
    patience: int
    best_loss: float = float("inf")
    best_epoch: int = 0
    waited: int = 0

    def update(self, val_loss: float, epoch: int) -> bool:
        """Record one epoch; True when it is the new best."""
        if val_loss < self.best_loss:
            self.best_loss, self.best_epoch, self.waited = val_loss, epoch, 0
            return True
        self.waited += 1
        return False

    @property
    def should_stop(self) -> bool:
        return self.waited >= self.patience


@dataclass
class TrainingHistory:
    epochs: List[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0

    def to_list(self) -> List[Dict[str, float]]:
        return [e.to_dict() for e in self.epochs]

    @property
    def val_losses(self) -> List[float]:
        return [e.val_loss for e in self.epochs]


def _batches(n: int, size: int, order: np.ndarray):
    for start in range(0, n, size):
        yield order[start:start + size]


def predict_logits(model: ModelGraph, data: Dataset) -> np.ndarray:
    chunks = []
    for idx in _batches(len(data), INFER_BATCH, np.arange(len(data))):
        inputs, mask, _, _ = data.batch(idx)
        chunks.append(model.forward(inputs, mask, mode="infer")[0])
    return np.concatenate(chunks, axis=0)


def predict_proba(model: ModelGraph, data: Dataset) -> np.ndarray:
    return softmax(predict_logits(model, data).astype(np.float64))


def evaluate_loss(model: ModelGraph, data: Dataset) -> float:
    logits = predict_logits(model, data).astype(np.float64)
    weights = None if data.weights is None else data.weights.astype(np.float64)
    loss, _ = softmax_cross_entropy(logits, data.labels, weights)
    return loss


def _train_epoch(model: ModelGraph, train: Dataset, state: AdamState, config: TrainConfig,
                 rng: np.random.Generator) -> float:
    total = 0.0
    for idx in _batches(len(train), config.batch_size, rng.permutation(len(train))):
        inputs, mask, labels, weights = train.batch(idx)
        logits, _ = model.forward(inputs, mask, mode="train", rng=rng)
        loss, grad = softmax_cross_entropy(logits, labels, weights)
        grads = model.backward(grad.astype(model.dtype))
        adam_step(model.params, grads, state, config)
        total += loss * len(idx)
    return total / len(train)


def train_supervised(model: ModelGraph, train: Dataset, val: Dataset,
                     config: Optional[TrainConfig] = None,
                     clock: Callable[[], float] = time.perf_counter) -> Tuple[ModelGraph, TrainingHistory]:
    """
    Train ``model`` in place and restore the parameters of its best validation epoch.
    """
    config = config or TrainConfig()
    if len(train) == 0 or len(val) == 0:
        raise PreconditionError("training and validation sets must be non-empty")
    rng = np.random.default_rng(config.seed)
    state = AdamState.for_params(model.params)
    stopper = EarlyStopping(config.patience)
    best_params = model.get_params()
    history = TrainingHistory()

    for epoch in range(1, config.max_epochs + 1):
        started = clock()
        try:
            train_loss = _train_epoch(model, train, state, config, rng)
            val_loss = evaluate_loss(model, val)
        except NumericError as exc:
            raise TrainingError("loss diverged", epoch=epoch) from exc
        if not (np.isfinite(train_loss) and np.isfinite(val_loss)):
            raise TrainingError("loss diverged", epoch=epoch)
        history.epochs.append(EpochRecord(epoch, train_loss, val_loss, clock() - started))
        if stopper.update(val_loss, epoch):
            best_params = model.get_params()
        logger.info("epoch %d: train_loss=%.4f val_loss=%.4f", epoch, train_loss, val_loss)
        if stopper.should_stop:
            logger.info("early stop after epoch %d (best epoch %d)", epoch, stopper.best_epoch)
            break

    model.set_params(best_params)
    history.best_epoch = stopper.best_epoch
    return model, history
