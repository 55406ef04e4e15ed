"""
Finite-difference verification of analytic gradients.
"""
import logging
from typing import Dict, List, Tuple

import numpy as np

from .graph import ModelGraph
from .losses import softmax_cross_entropy
from .training import Dataset

logger = logging.getLogger(__name__)


def _loss(model: ModelGraph, batch: Dataset, seed: int, backward: bool = False):
    # a fresh generator per evaluation keeps dropout masks identical
    rng = np.random.default_rng(seed)
    logits, _ = model.forward(batch.inputs, batch.mask, mode="train", rng=rng)
    loss, grad = softmax_cross_entropy(logits, batch.labels, batch.weights)
    if backward:
        return loss, model.backward(grad)
    return loss, None


def _sample_coordinates(params: Dict[str, np.ndarray], max_params: int,
                        rng: np.random.Generator) -> List[Tuple[str, int]]:
    total = sum(p.size for p in params.values())
    if total <= max_params:
        return [(name, i) for name, p in params.items() for i in range(p.size)]
    per_tensor = max(max_params // len(params), 1)
    coords = []
    for name, p in params.items():
        take = min(p.size, per_tensor)
        for i in np.sort(rng.choice(p.size, size=take, replace=False)):
            coords.append((name, int(i)))
    return coords


def grad_check(model: ModelGraph, batch: Dataset, eps: float = 1e-5,
               max_params: int = 400, seed: int = 0) -> float:
    """
    Max relative error |a - n| / max(|a| + |n|, 1e-7) between analytic and
    central-difference gradients, over all parameters or a seeded sample of
    ``max_params`` of them spread across every tensor. Runs in float64.
    """
    model64 = model.astype(np.float64)
    batch64 = Dataset(batch.inputs if np.issubdtype(np.asarray(batch.inputs).dtype, np.integer)
                      else np.asarray(batch.inputs, dtype=np.float64),
                      batch.labels,
                      None if batch.weights is None else np.asarray(batch.weights, dtype=np.float64),
                      batch.mask)
    _, analytic = _loss(model64, batch64, seed, backward=True)
    params = model64.params
    coords = _sample_coordinates(params, max_params, np.random.default_rng(seed))

    worst = 0.0
    worst_at = None
    for name, i in coords:
        p = params[name]
        original = p.flat[i]
        p.flat[i] = original + eps
        up, _ = _loss(model64, batch64, seed)
        p.flat[i] = original - eps
        down, _ = _loss(model64, batch64, seed)
        p.flat[i] = original
        numeric = (up - down) / (2.0 * eps)
        a = float(analytic.get(name, np.zeros_like(p)).flat[i])
        err = abs(a - numeric) / max(abs(a) + abs(numeric), 1e-7)
        if err > worst:
            worst, worst_at = err, (name, i)
    logger.info("grad_check: %d coordinates, max relative error %.3e at %s",
                len(coords), worst, worst_at)
    return worst
