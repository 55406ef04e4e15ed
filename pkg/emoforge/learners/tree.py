"""
CART decision tree with weighted Gini impurity.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..schemas.schema import TreeHyper
from .base import WeakLearner, mean_normalized

FEATURE_BLOCK = 256
LEAF = -1


def resolve_max_features(max_features, n_features: int) -> int:
    if max_features is None or max_features == "all":
        return n_features
    if max_features == "sqrt":
        return max(1, int(math.sqrt(n_features)))
    return max(1, min(int(max_features), n_features))


@dataclass
class TreeArrays:
    """Flat node arrays; leaves have feature == -1."""
    feature: List[int] = field(default_factory=list)
    threshold: List[float] = field(default_factory=list)
    left: List[int] = field(default_factory=list)
    right: List[int] = field(default_factory=list)
    value: List[np.ndarray] = field(default_factory=list)

    def add(self, distribution: np.ndarray) -> int:
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(distribution)
        return len(self.feature) - 1


def _best_split(X: np.ndarray, onehot: np.ndarray, features: np.ndarray,
                min_leaf: float) -> Optional[Tuple[float, int, float]]:
    """(weighted impurity, feature, threshold) of the best split, or None."""
    n = X.shape[0]
    total = onehot.sum(axis=0)
    best: Optional[Tuple[float, int, float]] = None
    for start in range(0, len(features), FEATURE_BLOCK):
        block = features[start:start + FEATURE_BLOCK]
        values = X[:, block]
        order = np.argsort(values, axis=0, kind="stable")
        sorted_vals = np.take_along_axis(values, order, axis=0)
        left = np.cumsum(onehot[order], axis=0)[:-1]
        right = total - left
        left_mass = left.sum(axis=-1)
        right_mass = right.sum(axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            impurity = (left_mass - (left ** 2).sum(axis=-1) / left_mass
                        + right_mass - (right ** 2).sum(axis=-1) / right_mass)
        valid = ((sorted_vals[:-1] < sorted_vals[1:])
                 & (left_mass >= min_leaf) & (right_mass >= min_leaf)
                 & (left_mass > 0) & (right_mass > 0))
        impurity = np.where(valid, impurity, np.inf)
        # feature-major scan: lower feature index wins ties, then lower position
        flat = impurity.T.ravel()
        pos = int(np.argmin(flat))
        score = flat[pos]
        if not np.isfinite(score) or (best is not None and score >= best[0]):
            continue
        j, i = divmod(pos, n - 1)
        threshold = 0.5 * (sorted_vals[i, j] + sorted_vals[i + 1, j])
        best = (float(score), int(block[j]), float(threshold))
    return best


def grow_tree(X: np.ndarray, y: np.ndarray, w: np.ndarray, num_classes: int, max_depth: int,
              min_leaf_mass: float, max_features: int, rng: np.random.Generator) -> TreeArrays:
    """Grow a tree depth-first; ``w`` are already-normalized weights."""
    onehot_all = np.zeros((len(y), num_classes))
    onehot_all[np.arange(len(y)), y] = w
    tree = TreeArrays()
    n_features = X.shape[1]
    stack = [(np.arange(len(y)), 0, None, None)]
    while stack:
        idx, depth, parent, side = stack.pop()
        mass = onehot_all[idx].sum(axis=0)
        node = tree.add(mass / mass.sum() if mass.sum() > 0 else np.full(num_classes, 1.0 / num_classes))
        if parent is not None:
            (tree.left if side == "left" else tree.right)[parent] = node
        total = mass.sum()
        parent_impurity = total - (mass ** 2).sum() / total if total > 0 else 0.0
        if depth >= max_depth or np.count_nonzero(mass) <= 1 or len(idx) < 2:
            continue
        if max_features < n_features:
            features = np.sort(rng.choice(n_features, size=max_features, replace=False))
        else:
            features = np.arange(n_features)
        split = _best_split(X[idx], onehot_all[idx], features, min_leaf_mass)
        if split is None or split[0] >= parent_impurity - 1e-12:
            continue
        _, feature, threshold = split
        tree.feature[node] = feature
        tree.threshold[node] = threshold
        go_left = X[idx, feature] <= threshold
        # right child pushed first so the left subtree is numbered first
        stack.append((idx[~go_left], depth + 1, node, "right"))
        stack.append((idx[go_left], depth + 1, node, "left"))
    return tree


class FittedTree:
    """Array form of a grown tree, used by both the tree and the forest learners."""

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=np.float64)

    @classmethod
    def from_arrays(cls, arrays: TreeArrays) -> "FittedTree":
        return cls(arrays.feature, arrays.threshold, arrays.left, arrays.right, np.stack(arrays.value))

    @property
    def node_count(self) -> int:
        return len(self.feature)

    def depth(self) -> int:
        depths = np.zeros(self.node_count, dtype=np.int64)
        for node in range(self.node_count):
            if self.feature[node] != LEAF:
                depths[self.left[node]] = depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        active = self.feature[node] != LEAF
        while active.any():
            rows = np.flatnonzero(active)
            current = node[rows]
            go_left = X[rows, self.feature[current]] <= self.threshold[current]
            node[rows] = np.where(go_left, self.left[current], self.right[current])
            active = self.feature[node] != LEAF
        return node

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> Dict[str, Any]:
        return {"feature": self.feature.tolist(), "threshold": self.threshold.tolist(),
                "left": self.left.tolist(), "right": self.right.tolist(), "value": self.value.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FittedTree":
        return cls(data["feature"], data["threshold"], data["left"], data["right"], data["value"])


class DecisionTreeLearner(WeakLearner):
    kind = "decision_tree"
    hyper_model = TreeHyper

    def _fit(self, X, y, w, val):
        hyper = self.hyper
        rng = np.random.default_rng(self.seed)
        arrays = grow_tree(X, y, mean_normalized(w), self.num_classes, hyper.max_depth,
                           hyper.min_leaf_mass, resolve_max_features(hyper.max_features, X.shape[1]), rng)
        self.tree = FittedTree.from_arrays(arrays)

    def _predict_proba(self, X):
        return self.tree.predict_proba(X)

    def state_dict(self) -> Dict[str, Any]:
        return self.tree.to_dict()

    def load_state(self, state: Dict[str, Any]) -> None:
        self.tree = FittedTree.from_dict(state)
