"""
SMOTE oversampling in whatever feature space the caller selected.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import BalancingError, PreconditionError
from ..schemas.schema import SmoteConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SyntheticOrigin:
    """Provenance of one synthetic point: s = X[origin] + lam * (X[neighbor] - X[origin])."""
    label: Hashable
    origin: int
    neighbor: int
    lam: float


@dataclass
class SmoteResult:
    X: np.ndarray
    y: List[Hashable]
    origins: List[SyntheticOrigin] = field(default_factory=list)
    before: Dict[Hashable, int] = field(default_factory=dict)
    effective_k: Dict[Hashable, int] = field(default_factory=dict)

    def report(self) -> Dict[str, Any]:
        after = Counter(self.y)
        synthetic = Counter(o.label for o in self.origins)
        classes = [_label_name(c) for c in _ordered_classes(self.y)]
        by_name = {_label_name(c): c for c in _ordered_classes(self.y)}
        return {
            "classes": {name: {"before": self.before.get(by_name[name], 0),
                               "after": after[by_name[name]],
                               "synthetic": synthetic[by_name[name]]}
                        for name in classes},
            "synthetic_total": len(self.origins),
        }


def _label_name(label: Hashable) -> str:
    return str(getattr(label, "value", label))


def _class_key(label: Hashable):
    index = getattr(label, "index", None)
    return (0, index, "") if isinstance(index, int) else (1, 0, str(label))


def _ordered_classes(y: Sequence[Hashable]) -> List[Hashable]:
    return sorted(set(y), key=_class_key)


def _as_matrix(X: Sequence[np.ndarray]) -> np.ndarray:
    if isinstance(X, np.ndarray):
        if X.ndim != 2:
            raise PreconditionError("SMOTE expects an (n, d) matrix")
        return X.astype(np.float64)
    dims = {len(np.ravel(x)) for x in X}
    if len(dims) > 1:
        raise PreconditionError(f"feature vectors have mixed dimensions {sorted(dims)}")
    if not X:
        return np.zeros((0, 0))
    return np.stack([np.ravel(np.asarray(x, dtype=np.float64)) for x in X])


def _resolve_target(counts: Counter, target) -> int:
    if target == "max":
        return max(counts.values())
    return int(target)


def smote_resample(X: Sequence[np.ndarray], y: Sequence[Hashable],
                   config: Optional[SmoteConfig] = None) -> SmoteResult:
    """
    Oversample every class below the target count.

    Originals come first and unchanged; synthetic points follow grouped by
    class in label order.
    """
    config = config or SmoteConfig()
    matrix = _as_matrix(X)
    labels = list(y)
    if len(labels) != matrix.shape[0]:
        raise PreconditionError(f"{matrix.shape[0]} vectors but {len(labels)} labels")
    counts = Counter(labels)
    result = SmoteResult(matrix.copy(), list(labels), before=dict(counts))
    if not labels:
        return result
    target = _resolve_target(counts, config.target)

    rng = np.random.default_rng(config.seed)
    new_rows: List[np.ndarray] = []
    for label in _ordered_classes(labels):
        n_new = target - counts[label]
        if n_new <= 0:
            continue
        members = np.array([i for i, lab in enumerate(labels) if lab == label])
        if len(members) < 2:
            raise BalancingError(
                f"class {_label_name(label)!r} has a single sample; SMOTE needs at least 2")
        k = min(config.k, len(members) - 1)
        result.effective_k[label] = k
        points = matrix[members]
        dist = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=-1))
        np.fill_diagonal(dist, np.inf)
        neighbors = np.argsort(dist, axis=1, kind="stable")[:, :k]

        picks = rng.integers(len(members), size=n_new)
        which = rng.integers(k, size=n_new)
        lams = rng.random(n_new)
        for p, q, lam in zip(picks, which, lams):
            origin, neighbor = members[p], members[neighbors[p, q]]
            x = matrix[origin]
            new_rows.append(x + lam * (matrix[neighbor] - x))
            result.origins.append(SyntheticOrigin(label, int(origin), int(neighbor), float(lam)))
        result.y.extend([label] * n_new)
        logger.info("SMOTE: class %s %d -> %d (k=%d)", _label_name(label), counts[label], target, k)

    if new_rows:
        result.X = np.vstack([result.X, np.stack(new_rows)])
    return result


def smote_balance(X: Sequence[np.ndarray], y: Sequence[Hashable],
                  config: Optional[SmoteConfig] = None) -> Tuple[np.ndarray, List[Hashable]]:
    result = smote_resample(X, y, config)
    return result.X, result.y


def smote_report(result: SmoteResult) -> Dict[str, Any]:
    return result.report()


def flatten_sequences(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """(n, T, d) values plus (n, T) mask -> (n, T*d + T) rows."""
    n = values.shape[0]
    return np.concatenate([values.reshape(n, -1), mask.reshape(n, -1).astype(np.float64)], axis=1)


def unflatten_sequences(rows: np.ndarray, steps: int, dim: int) -> Tuple[np.ndarray, np.ndarray]:
    """Inverse of flatten_sequences; a position is valid where its mask is positive."""
    n = rows.shape[0]
    values = rows[:, :steps * dim].reshape(n, steps, dim)
    mask = rows[:, steps * dim:] > 0
    return values * mask[..., None], mask
