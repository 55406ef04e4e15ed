"""
Trained pipelines: text normalization + featurizer + fitted model, and their
single-document JSON artifact.
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .boosting import BoostedEnsemble, boost_fit, head_factory
from .corpus import Corpus, EmotionLabel, Split
from .errors import DataFormatError, PersistenceError, PreconditionError
from .features.base import Featurizer, SequenceFeatures
from .features.factory import FeaturizerFactory
from .features.smote import smote_resample
from .learners.base import Inputs, WeakLearner
from .learners.factory import MODEL_CODES, LearnerFactory, learner_config
from .neural.graph import MODEL_FORMAT_VERSION
from .schemas.schema import EmoforgeConfig, RunManifest
from .splits import SplitData, prepare_splits
from .textprep import TextPipeline

logger = logging.getLogger(__name__)

SEQUENCE_MODELS = ("rnn", "lstm", "hybrid")
Model = Union[WeakLearner, BoostedEnsemble]


@dataclass
class FittedModel:
    """A model fitted on featurized training data, with how it consumes features."""
    code: str
    model: Model
    input_style: str
    interpretation: bool = False
    smote_report: Optional[Dict[str, Any]] = None


def input_style(feature: Featurizer, code: str) -> str:
    if code in SEQUENCE_MODELS and feature.sequential:
        return "sequence"
    return "vector"


def is_interpretation(feature: Featurizer, code: str) -> bool:
    """True for pairs whose wiring is a chosen reading rather than a given recipe."""
    if code in SEQUENCE_MODELS:
        return not feature.sequential
    if code == "ensemble":
        return feature.kind != "contextual"
    return False


def featurize(feature: Featurizer, docs: Sequence[Sequence[str]], style: str) -> Inputs:
    if style == "sequence":
        return feature.transform_sequences(docs)
    return feature.transform(docs)


def _balance(X: Inputs, y: np.ndarray, settings: EmoforgeConfig, seed: int) -> Tuple[Inputs, np.ndarray, Dict]:
    config = settings.smote.model_copy(update={"seed": seed})
    names = [EmotionLabel.from_index(int(i)) for i in y]
    if isinstance(X, SequenceFeatures):
        steps, dim = X.values.shape[1], X.dim
        result = smote_resample(X.flatten(), names, config)
        balanced = SequenceFeatures.from_flat(result.X, steps, dim)
    else:
        result = smote_resample(X, names, config)
        balanced = result.X
    labels = np.asarray([label.index for label in result.y], dtype=np.int64)
    return balanced, labels, result.report()


def fit_model(feature: Featurizer, code: str, train: SplitData, val: SplitData,
              settings: EmoforgeConfig, seed: int, balance: bool = False) -> FittedModel:
    """
    Fit model ``code`` (a learner code or 'ensemble') over a fitted featurizer.

    SMOTE, when enabled, touches the training split only.
    """
    if code != "ensemble" and code not in MODEL_CODES:
        raise PreconditionError(f"unknown model {code!r}; choose from {list(MODEL_CODES) + ['ensemble']}")
    style = input_style(feature, code)
    interpretation = is_interpretation(feature, code)
    if interpretation:
        logger.warning("%s over %s features is an interpretation: %s", code, feature.kind,
                       "per-sentence vector repeated per position" if code in SEQUENCE_MODELS
                       else "cold-start softmax heads")

    X, y = featurize(feature, train.docs, style), train.labels
    report = None
    if balance:
        X, y, report = _balance(X, y, settings, seed)
    val_set = (featurize(feature, val.docs, style), val.labels) if len(val) else None

    if code == "ensemble":
        init = feature.head_params() if feature.kind == "contextual" else None
        factory = head_factory(settings, init, val_set)
        model: Model = boost_fit(factory, X, y, settings.boost.model_copy(update={"seed": seed}))
    else:
        model = LearnerFactory.create_learner(code, learner_config(code, settings), seed)
        model.fit(X, y, None, val_set)
    return FittedModel(code, model, style, interpretation, report)


def _model_to_dict(model: Model) -> Dict[str, Any]:
    if isinstance(model, BoostedEnsemble):
        return {"type": "ensemble", **model.to_dict()}
    return {"type": "learner", **model.to_dict()}


def _model_from_dict(data: Dict[str, Any]) -> Model:
    data = dict(data)
    kind = data.pop("type", None)
    if kind == "ensemble":
        return BoostedEnsemble.from_dict(data)
    if kind == "learner":
        return LearnerFactory.from_dict(data)
    raise DataFormatError(f"unknown model type {kind!r} in artifact")


@dataclass
class TrainedPipeline:
    """Everything needed to turn raw text into an emotion label."""
    text: TextPipeline
    featurizer: Featurizer
    fitted: FittedModel
    balanced: bool = False
    manifest: Optional[RunManifest] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def inputs(self, texts: Sequence[str]) -> Inputs:
        return self.inputs_from_docs([self.text.apply(t) for t in texts])

    def inputs_from_docs(self, docs: Sequence[Sequence[str]]) -> Inputs:
        return featurize(self.featurizer, docs, self.fitted.input_style)

    def predict_docs(self, docs: Sequence[Sequence[str]]) -> np.ndarray:
        return self.fitted.model.predict(self.inputs_from_docs(docs))

    def predict_texts(self, texts: Sequence[str]) -> List[EmotionLabel]:
        return [EmotionLabel.from_index(int(i)) for i in self.fitted.model.predict(self.inputs(texts))]

    def predict_distribution(self, text: str) -> Dict[str, float]:
        probs = self.fitted.model.predict_distribution(self.inputs([text]))[0]
        return {EmotionLabel.from_index(i).value: float(p) for i, p in enumerate(probs)}

    def predict_text(self, text: str) -> EmotionLabel:
        return self.predict_texts([text])[0]

    def to_dict(self, omit_timing: bool = False) -> Dict[str, Any]:
        data = {
            "version": MODEL_FORMAT_VERSION,
            "text": self.text.to_dict(),
            "featurizer": self.featurizer.to_dict(),
            "model": _model_to_dict(self.fitted.model),
            "model_code": self.fitted.code,
            "input_style": self.fitted.input_style,
            "interpretation": self.fitted.interpretation,
            "balanced": self.balanced,
            "smote": self.fitted.smote_report,
            "manifest": (self.manifest.model_dump(exclude={"timestamp"} if omit_timing else None)
                         if self.manifest else None),
            "manifest_sha256": self.manifest.digest() if self.manifest else None,
            "extra": self.extra,
        }
        return strip_timing(data) if omit_timing else data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainedPipeline":
        if data.get("version") != MODEL_FORMAT_VERSION:
            raise DataFormatError(f"unsupported artifact version {data.get('version')!r}")
        try:
            fitted = FittedModel(data["model_code"], _model_from_dict(data["model"]), data["input_style"],
                                 bool(data.get("interpretation")), data.get("smote"))
            manifest = RunManifest.model_validate(data["manifest"]) if data.get("manifest") else None
            return cls(TextPipeline.from_dict(data["text"]), FeaturizerFactory.from_dict(data["featurizer"]),
                       fitted, bool(data.get("balanced")), manifest, dict(data.get("extra") or {}))
        except KeyError as exc:
            raise DataFormatError(f"artifact is missing field {exc.args[0]!r}") from None


def strip_timing(data: Any) -> Any:
    """Copy of ``data`` with every 'seconds' entry blanked."""
    if isinstance(data, dict):
        return {k: (None if k == "seconds" else strip_timing(v)) for k, v in data.items()}
    if isinstance(data, list):
        return [strip_timing(v) for v in data]
    return data


def train_pipeline(corpus: Corpus, text: TextPipeline, feature: str, model: str,
                   settings: Optional[EmoforgeConfig] = None, balance: bool = False,
                   seed: int = 0, manifest: Optional[RunManifest] = None) -> TrainedPipeline:
    """Fit featurizer and model on the corpus' training split."""
    settings = settings or EmoforgeConfig()
    splits = prepare_splits(corpus, text)
    train, val = splits[Split.TRAIN], splits[Split.VAL]
    featurizer = FeaturizerFactory.from_settings(feature, settings)
    logger.info("fitting %s features on %d training sentences", feature, len(train))
    featurizer.fit(train.docs, train.labels, val.docs, val.labels)
    fitted = fit_model(featurizer, model, train, val, settings, seed, balance)
    return TrainedPipeline(text, featurizer, fitted, balance, manifest)


def save_artifact(pipeline: TrainedPipeline, path: str, omit_timing: bool = False) -> None:
    payload = json.dumps(pipeline.to_dict(omit_timing), ensure_ascii=False, sort_keys=True)
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(payload)
    except OSError as exc:
        raise PersistenceError(f"cannot write model {path}: {exc}") from exc


def load_artifact(path: str) -> TrainedPipeline:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise PersistenceError(f"cannot read model {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataFormatError.from_decode(path, exc) from None
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"model {path} is not valid JSON ({exc.msg})") from None
    return TrainedPipeline.from_dict(data)
