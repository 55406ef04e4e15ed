"""
Configuration and record schemas.

Every tunable default of the toolkit lives here so that a JSON config file
can mirror the whole tree and the run manifest can echo it back.
"""
import hashlib
import json
import math
import os
from datetime import datetime, timezone
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

FEATURE_KINDS = ("count", "tfidf", "skipgram", "subword", "contextual")
MODEL_KINDS = ("dt", "rf", "svm", "nb", "rnn", "lstm", "hybrid", "ensemble")
NUM_CLASSES = 8


class _Config(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# -----------------------------
# Corpus / text preparation
# -----------------------------
class SplitSpec(_Config):
    ratios: Tuple[float, float, float] = (0.70, 0.15, 0.15)
    seed: int = 13

    @field_validator("ratios")
    @classmethod
    def _check_ratios(cls, ratios):
        if any(not 0.0 < r < 1.0 for r in ratios):
            raise ValueError("each split ratio must lie in (0, 1)")
        if abs(sum(ratios) - 1.0) > 1e-9:
            raise ValueError(f"split ratios must sum to 1, got {sum(ratios)}")
        return ratios


class CleanConfig(_Config):
    strip_html: bool = True
    strip_urls: bool = True
    strip_digits: bool = True
    strip_punct: bool = True
    combining_marks_to_strip: List[str] = Field(default_factory=list)

    @field_validator("combining_marks_to_strip")
    @classmethod
    def _single_code_points(cls, marks):
        for mark in marks:
            if len(mark) != 1:
                raise ValueError(f"combining mark entries must be single code points, got {mark!r}")
        return marks


class TextprepConfig(_Config):
    clean: CleanConfig = CleanConfig()
    stopwords_path: Optional[str] = None
    emoji_map_path: Optional[str] = None


# -----------------------------
# Features
# -----------------------------
class VocabConfig(_Config):
    min_freq: int = Field(default=1, ge=1)


class SkipGramConfig(_Config):
    dim: int = Field(default=100, ge=1)
    window: int = Field(default=5, ge=0)
    negatives: int = Field(default=5, ge=1)
    epochs: int = Field(default=5, ge=1)
    lr0: float = Field(default=0.025, gt=0)
    min_lr_fraction: float = Field(default=1e-4, ge=0)
    seed: int = 1


class SubwordConfig(SkipGramConfig):
    n_min: int = Field(default=3, ge=1)
    n_max: int = Field(default=6, ge=1)
    buckets: int = Field(default=2 ** 21, ge=1)

    @model_validator(mode="after")
    def _check_range(self):
        if self.n_max < self.n_min:
            raise ValueError("n_max must be >= n_min")
        return self


class SequenceConfig(_Config):
    """Cap on the number of positions a sequential featurizer emits."""
    max_len: int = Field(default=64, ge=1)


class SmoteConfig(_Config):
    k: int = Field(default=5, ge=1)
    seed: int = 0
    target: Union[Literal["max"], int] = "max"


# -----------------------------
# Neural
# -----------------------------
class TrainConfig(_Config):
    learning_rate: float = Field(default=1e-3, gt=0)
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = Field(default=32, ge=1)
    max_epochs: int = Field(default=100, ge=1)
    patience: int = Field(default=5, ge=1)
    seed: int = 0


class EncoderConfig(_Config):
    vocab_size: Optional[int] = None
    max_len: int = Field(default=64, ge=2)
    model_dim: int = Field(default=64, ge=1)
    heads: int = Field(default=2, ge=1)
    blocks: int = Field(default=2, ge=1)
    ff_dim: int = Field(default=128, ge=1)
    head_dropout: float = Field(default=0.1, ge=0.0, lt=1.0)
    min_freq: int = Field(default=1, ge=1)
    seed: int = 7

    @model_validator(mode="after")
    def _check_heads(self):
        if self.model_dim % self.heads:
            raise ValueError("model_dim must be divisible by heads")
        return self


class HybridConfig(_Config):
    embedding_dim: int = Field(default=100, ge=1)
    kernel_width: int = Field(default=3, ge=1)
    filters: int = Field(default=64, ge=1)
    pool_width: int = Field(default=2, ge=1)
    hidden: int = Field(default=64, ge=1)
    dropout: float = Field(default=0.1, ge=0.0, lt=1.0)
    num_classes: int = NUM_CLASSES
    max_len: int = Field(default=64, ge=1)
    repeat_positions: int = Field(default=8, ge=1)
    min_freq: int = Field(default=1, ge=1)
    seed: int = 11

    @field_validator("num_classes")
    @classmethod
    def _eight_classes(cls, value):
        if value != NUM_CLASSES:
            raise ValueError(f"output dimension must equal the label-space size {NUM_CLASSES}")
        return value


# -----------------------------
# Learners
# -----------------------------
MaxFeatures = Union[None, Literal["sqrt", "all"], int]


class NaiveBayesHyper(_Config):
    alpha: float = Field(default=1.0, gt=0)


class TreeHyper(_Config):
    max_depth: int = Field(default=20, ge=1)
    min_leaf_mass: float = Field(default=1e-6, ge=0)
    max_features: MaxFeatures = None


class ForestHyper(_Config):
    n_trees: int = Field(default=100, ge=1)
    bootstrap: bool = True
    max_depth: int = Field(default=20, ge=1)
    min_leaf_mass: float = Field(default=1e-6, ge=0)
    max_features: MaxFeatures = "sqrt"


class SvmHyper(_Config):
    lam: float = Field(default=1e-4, gt=0)
    epochs: int = Field(default=10, ge=1)
    eta0: float = Field(default=0.01, gt=0)


class SoftmaxHeadHyper(_Config):
    dropout: float = Field(default=0.1, ge=0.0, lt=1.0)
    train: TrainConfig = TrainConfig()
    jitter: float = Field(default=0.01, ge=0.0)


class LearnersConfig(_Config):
    nb: NaiveBayesHyper = NaiveBayesHyper()
    dt: TreeHyper = TreeHyper()
    rf: ForestHyper = ForestHyper()
    svm: SvmHyper = SvmHyper()
    head: SoftmaxHeadHyper = SoftmaxHeadHyper()


# -----------------------------
# Boosting / evaluation
# -----------------------------
class BoostConfig(_Config):
    rounds: int = Field(default=10, ge=1)
    num_classes: int = Field(default=NUM_CLASSES, ge=2)
    max_rejections: int = Field(default=3, ge=1)
    alpha_cap: float = Field(default=math.log(1e10), gt=0)
    seed: int = 0


class GridSpec(_Config):
    features: List[str] = Field(default_factory=lambda: list(FEATURE_KINDS))
    models: List[str] = Field(default_factory=lambda: list(MODEL_KINDS))
    seed: int = 0
    balance: bool = False

    @field_validator("features")
    @classmethod
    def _known_features(cls, features):
        if not features:
            raise ValueError("feature set must not be empty")
        unknown = [f for f in features if f not in FEATURE_KINDS]
        if unknown:
            raise ValueError(f"unknown feature kinds {unknown}; choose from {list(FEATURE_KINDS)}")
        return features

    @field_validator("models")
    @classmethod
    def _known_models(cls, models):
        if not models:
            raise ValueError("model set must not be empty")
        unknown = [m for m in models if m not in MODEL_KINDS]
        if unknown:
            raise ValueError(f"unknown model kinds {unknown}; choose from {list(MODEL_KINDS)}")
        return models


class EmoforgeConfig(_Config):
    """Root of the configuration tree; a config file is a partial copy of it."""
    textprep: TextprepConfig = TextprepConfig()
    split: SplitSpec = SplitSpec()
    vocab: VocabConfig = VocabConfig()
    skipgram: SkipGramConfig = SkipGramConfig()
    subword: SubwordConfig = SubwordConfig()
    smote: SmoteConfig = SmoteConfig()
    encoder: EncoderConfig = EncoderConfig()
    hybrid: HybridConfig = HybridConfig()
    train: TrainConfig = TrainConfig()
    head_train: TrainConfig = TrainConfig(learning_rate=2e-5)
    learners: LearnersConfig = LearnersConfig()
    boost: BoostConfig = BoostConfig()


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively overlay ``override`` on ``base`` (dicts merge, everything else replaces)."""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def resolve_config(file_config: Optional[Dict[str, Any]] = None,
                   overrides: Optional[Dict[str, Any]] = None) -> EmoforgeConfig:
    """
    Resolve the effective configuration.

    Precedence is overrides (command-line flags) > file_config > defaults.
    """
    tree = EmoforgeConfig().model_dump()
    if file_config:
        tree = deep_merge(tree, file_config)
    if overrides:
        tree = deep_merge(tree, overrides)
    return EmoforgeConfig.model_validate(tree)


# -----------------------------
# Run manifest
# -----------------------------
def _timestamp() -> str:
    epoch = os.getenv("SOURCE_DATE_EPOCH")
    moment = (datetime.fromtimestamp(int(epoch), tz=timezone.utc) if epoch
              else datetime.now(tz=timezone.utc))
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def file_digest(path: str) -> str:
    sha = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            sha.update(block)
    return sha.hexdigest()


class RunManifest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tool_version: str
    subcommand: str
    config: Dict[str, Any] = Field(default_factory=dict)
    seeds: Dict[str, int] = Field(default_factory=dict)
    input_digests: Dict[str, str] = Field(default_factory=dict)
    extra: Dict[str, Any] = Field(default_factory=dict)
    timestamp: str = Field(default_factory=_timestamp)

    def digest(self) -> str:
        """SHA-256 over the canonical manifest, timestamp excluded."""
        payload = self.model_dump(exclude={"timestamp"})
        canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
