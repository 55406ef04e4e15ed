"""
Softmax and the sample-weighted cross-entropy used by every classifier head.
"""
from typing import Optional, Tuple

import numpy as np

from ..errors import NumericError, PreconditionError

LOG_EPS = 1e-12


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max-subtraction; works on a vector or a (B, K) batch."""
    logits = np.asarray(logits)
    if not np.all(np.isfinite(logits)):
        raise NumericError("softmax input contains NaN or Inf")
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def weighted_cross_entropy(probs: np.ndarray, label: int, weight: float = 1.0) -> float:
    """-weight * ln(probs[label] + 1e-12)."""
    if not 0 <= label < len(probs):
        raise IndexError(f"label {label} outside [0, {len(probs)})")
    if weight < 0:
        raise PreconditionError("sample weight must be non-negative")
    return float(-weight * np.log(probs[label] + LOG_EPS))


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray,
                          weights: Optional[np.ndarray] = None) -> Tuple[float, np.ndarray]:
    """
    Mean weighted cross-entropy over a batch and its gradient w.r.t. the logits.

    The fused gradient is w_i * (p_i - onehot(y_i)) / B.
    """
    batch, classes = logits.shape
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= classes):
        raise IndexError(f"label outside [0, {classes})")
    weights = np.ones(batch, dtype=logits.dtype) if weights is None else np.asarray(weights, dtype=logits.dtype)
    probs = softmax(logits)
    picked = probs[np.arange(batch), labels]
    loss = float(np.sum(-weights * np.log(picked + LOG_EPS)) / batch)
    grad = probs.copy()
    grad[np.arange(batch), labels] -= 1.0
    grad *= (weights / batch)[:, None]
    return loss, grad
