"""
Multiclass AdaBoost (SAMME stage weights) over weighted weak learners, and
the contextual-encoder ensemble built on it.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .corpus import Corpus, EmotionLabel, Split
from .errors import BoostingError, PreconditionError, RoundRejectedError
from .features.contextual import ContextualFeaturizer
from .features.factory import FeaturizerFactory
from .features.smote import SmoteResult, smote_resample
from .learners.base import Inputs, WeakLearner
from .learners.factory import LearnerFactory, learner_config
from .learners.softmax_head import SoftmaxHeadLearner
from .schemas.schema import BoostConfig, EmoforgeConfig
from .splits import prepare_splits
from .textprep import TextPipeline

logger = logging.getLogger(__name__)

WeakFactory = Callable[[Inputs, np.ndarray, np.ndarray, int], WeakLearner]


@dataclass
class BoostedEnsemble:
    """Ordered (learner, alpha) members; every alpha is positive."""
    members: List[Tuple[WeakLearner, float]]
    config: BoostConfig = field(default_factory=BoostConfig)
    diagnostics: List[Dict[str, Any]] = field(default_factory=list)

    def __post_init__(self):
        if not self.members:
            raise PreconditionError("an ensemble needs at least one member")
        if any(alpha <= 0 for _, alpha in self.members):
            raise PreconditionError("member weights must be positive")

    @property
    def alphas(self) -> List[float]:
        return [alpha for _, alpha in self.members]

    def votes(self, X: Inputs, members: Optional[int] = None) -> np.ndarray:
        """(n, K) sums of alpha_t * [h_t(x) = j]."""
        n = len(X)
        total = np.zeros((n, self.config.num_classes))
        for learner, alpha in self.members[:members]:
            total[np.arange(n), learner.predict(X)] += alpha
        return total

    def predict(self, X: Inputs) -> np.ndarray:
        # argmax returns the first maximum, so ties go to the lower class index
        return np.argmax(self.votes(X), axis=1)

    def staged_predict(self, X: Inputs) -> Iterator[np.ndarray]:
        """Predictions of the first 1, 2, ... members."""
        n = len(X)
        total = np.zeros((n, self.config.num_classes))
        for learner, alpha in self.members:
            total[np.arange(n), learner.predict(X)] += alpha
            yield np.argmax(total, axis=1)

    def predict_distribution(self, X: Inputs) -> np.ndarray:
        """Vote shares (votes divided by the alpha total)."""
        return self.votes(X) / sum(self.alphas)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.model_dump(),
            "members": [{"alpha": alpha, "learner": learner.to_dict()} for learner, alpha in self.members],
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BoostedEnsemble":
        members = [(LearnerFactory.from_dict(m["learner"]), float(m["alpha"])) for m in data["members"]]
        return cls(members, BoostConfig.model_validate(data["config"]), list(data.get("diagnostics", [])))


# -----------------------------
# SAMME pieces
# -----------------------------
def weighted_error(h: WeakLearner, X: Inputs, y: np.ndarray, w: np.ndarray) -> float:
    """Sum of the weights of misclassified samples."""
    return float(np.sum(np.asarray(w)[h.predict(X) != np.asarray(y)]))


def alpha_from_error(error: float, num_classes: int, cap: float = math.log(1e10)) -> float:
    """
    ln((1 - E) / E) + ln(K - 1), capped; E = 0 gives the cap.

    Raises:
        RoundRejectedError: If E >= 1 - 1/K
    """
    if not 0.0 <= error <= 1.0:
        raise PreconditionError(f"weighted error {error} outside [0, 1]")
    if num_classes < 2:
        raise PreconditionError("boosting needs at least two classes")
    if error >= 1.0 - 1.0 / num_classes:
        raise RoundRejectedError(f"weighted error {error:.4f} is no better than chance "
                                 f"for {num_classes} classes", error)
    if error == 0.0:
        return cap
    return min(cap, math.log((1.0 - error) / error) + math.log(num_classes - 1))


def reweight(w: np.ndarray, correct: np.ndarray, alpha: float) -> np.ndarray:
    """
    Shrink correct samples by exp(-alpha/2), grow errors by exp(+alpha/2), then
    normalize. Errors end up exp(alpha) times heavier relative to correct samples.
    """
    if alpha <= 0:
        raise PreconditionError("alpha must be positive")
    updated = np.asarray(w, dtype=np.float64) * np.exp(np.where(correct, -0.5 * alpha, 0.5 * alpha))
    return updated / updated.sum()


def update_weights(w: np.ndarray, h: WeakLearner, X: Inputs, y: np.ndarray, alpha: float) -> np.ndarray:
    return reweight(w, h.predict(X) == np.asarray(y), alpha)


def boost_fit(weak_factory: WeakFactory, X: Inputs, y: np.ndarray,
              config: Optional[BoostConfig] = None) -> BoostedEnsemble:
    """
    Run ``config.rounds`` accepted rounds. A rejected round is retried with a
    fresh seed; ``max_rejections`` consecutive rejections abort the fit.
    Boosting stops early once a member makes no weighted error.
    """
    config = config or BoostConfig()
    y = np.asarray(y, dtype=np.int64)
    if len(y) < 2 or len(X) != len(y):
        raise PreconditionError("boosting needs at least two samples with one label each")
    if len(np.unique(y)) < 2:
        raise PreconditionError("boosting needs at least two classes present")

    rng = np.random.default_rng(config.seed)
    w = np.full(len(y), 1.0 / len(y))
    members: List[Tuple[WeakLearner, float]] = []
    diagnostics: List[Dict[str, Any]] = []
    rejected_in_row = 0
    while len(members) < config.rounds:
        round_no = len(members) + 1
        seed = int(rng.integers(0, 2 ** 31 - 1))
        learner = weak_factory(X, y, w, seed)
        correct = learner.predict(X) == y
        error = float(np.sum(w[~correct]))
        try:
            alpha = alpha_from_error(error, config.num_classes, config.alpha_cap)
        except RoundRejectedError:
            rejected_in_row += 1
            diagnostics.append({"round": round_no, "seed": seed, "error": error, "status": "rejected"})
            logger.warning("boosting round %d rejected (E=%.4f), attempt %d of %d",
                           round_no, error, rejected_in_row, config.max_rejections)
            if rejected_in_row >= config.max_rejections:
                raise BoostingError(f"{rejected_in_row} consecutive rejected rounds", diagnostics)
            continue
        rejected_in_row = 0
        diagnostics.append({"round": round_no, "seed": seed, "error": error, "status": "accepted",
                            "alpha": alpha})
        members.append((learner, alpha))
        logger.info("boosting round %d: E=%.4f alpha=%.4f", round_no, error, alpha)
        if error == 0.0:
            logger.info("member %d is perfect on the weighted sample; stopping", round_no)
            break
        w = reweight(w, correct, alpha)
    return BoostedEnsemble(members, config, diagnostics)


def boost_predict(ensemble: BoostedEnsemble, x: np.ndarray) -> EmotionLabel:
    """Weighted-vote label of a single feature vector."""
    return EmotionLabel.from_index(int(ensemble.predict(np.asarray(x)[None, :])[0]))


# -----------------------------
# Softmax-head ensembles
# -----------------------------
def head_factory(settings: EmoforgeConfig, init_params: Optional[Dict[str, np.ndarray]] = None,
                 val: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> WeakFactory:
    """
    Weak factory of softmax heads. Warm-started heads train at the
    ``head_train`` rate; cold heads use the learner defaults.
    """
    hyper = learner_config("softmax_head", settings)
    if init_params is not None:
        hyper["train"] = settings.head_train.model_dump()

    def factory(X, y, w, seed):
        learner = SoftmaxHeadLearner(hyper, seed, init_params=init_params)
        return learner.fit(X, y, w, val)

    return factory


@dataclass
class EnsembleFit:
    """Frozen contextual featurizer, boosted heads and what balancing did."""
    featurizer: ContextualFeaturizer
    ensemble: BoostedEnsemble
    balanced: bool = False
    smote: Optional[SmoteResult] = None

    def predict(self, docs: Sequence[Sequence[str]]) -> np.ndarray:
        return self.ensemble.predict(self.featurizer.transform(docs))


def fit_emobang_ensemble(corpus: Corpus, pipeline: TextPipeline,
                         settings: Optional[EmoforgeConfig] = None,
                         balance: bool = False) -> EnsembleFit:
    """
    Train the contextual encoder once on the training split, freeze it, then
    boost softmax heads warm-started from its fine-tuned head over the frozen
    pooled embeddings (SMOTE-balanced in that space when ``balance``).
    """
    settings = settings or EmoforgeConfig()
    splits = prepare_splits(corpus, pipeline)
    train, val = splits[Split.TRAIN], splits[Split.VAL]
    featurizer = FeaturizerFactory.from_settings("contextual", settings)
    featurizer.fit(train.docs, train.labels, val.docs, val.labels)

    X, y = featurizer.transform(train.docs), train.labels
    smote = None
    if balance:
        smote = smote_resample(X, [EmotionLabel.from_index(int(i)) for i in y], settings.smote)
        X, y = smote.X, np.asarray([label.index for label in smote.y], dtype=np.int64)
    val_set = (featurizer.transform(val.docs), val.labels) if len(val) else None
    factory = head_factory(settings, featurizer.head_params(), val_set)
    ensemble = boost_fit(factory, X, y, settings.boost)
    return EnsembleFit(featurizer, ensemble, balance, smote)
