"""
Emotion-labelled sentence corpora: data model, JSONL persistence,
majority-vote annotation and stratified splitting.
"""
import json
import logging
import unicodedata
from collections import Counter
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from .errors import DataFormatError, PersistenceError, PreconditionError, SampleNotFoundError
from .schemas.schema import SplitSpec

logger = logging.getLogger(__name__)

QUORUM = 3


class EmotionLabel(str, Enum):
    """The eight emotion categories, in their fixed integer order."""
    ANGER = "anger"
    SADNESS = "sadness"
    HAPPINESS = "happiness"
    DISGUST = "disgust"
    SARCASTIC = "sarcastic"
    FEAR = "fear"
    SURPRISE = "surprise"
    DISAPPOINTED = "disappointed"

    @property
    def index(self) -> int:
        return _LABEL_INDEX[self]

    @classmethod
    def from_index(cls, index: int) -> "EmotionLabel":
        return LABELS[index]

    @classmethod
    def parse(cls, value: Union[str, "EmotionLabel"]) -> "EmotionLabel":
        try:
            return cls(value)
        except ValueError:
            raise DataFormatError(f"unknown label {value!r}") from None


LABELS: Tuple[EmotionLabel, ...] = tuple(EmotionLabel)
_LABEL_INDEX = {label: i for i, label in enumerate(LABELS)}


class Source(str, Enum):
    FACEBOOK = "facebook"
    TWITTER = "twitter"
    NEWS = "news"
    ECOMMERCE = "ecommerce"
    OTHER = "other"


class Split(str, Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"


class Unresolved:
    """Marker returned by majority_vote when no label has a strict majority."""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Unresolved"

    def __bool__(self) -> bool:
        return False


UNRESOLVED = Unresolved()


class Sample(BaseModel):
    """One annotated sentence. Unknown keys are kept as extras."""
    model_config = ConfigDict(frozen=True, extra="allow")

    id: str
    text: str
    source: Source = Source.OTHER
    votes: Dict[str, EmotionLabel] = {}
    label: Optional[EmotionLabel] = None
    split: Optional[Split] = None
    adjudicated: bool = False

    def to_record(self) -> Dict[str, Any]:
        record: Dict[str, Any] = {
            "id": self.id,
            "text": self.text,
            "source": self.source.value,
            "label": self.label.value if self.label is not None else None,
            "votes": {k: v.value for k, v in self.votes.items()},
            "split": self.split.value if self.split is not None else None,
            "adjudicated": self.adjudicated,
        }
        record.update(self.model_extra or {})
        return record


class Annotator(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    role: str = "annotator"

    @property
    def is_lead(self) -> bool:
        return self.role == "lead"


class Corpus(BaseModel):
    """Ordered, immutable collection of samples."""
    model_config = ConfigDict(frozen=True)

    samples: Tuple[Sample, ...] = ()
    label_space: Tuple[EmotionLabel, ...] = LABELS

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def get(self, sample_id: str) -> Sample:
        for sample in self.samples:
            if sample.id == sample_id:
                return sample
        raise SampleNotFoundError(f"unknown sample id {sample_id!r}")

    def replace(self, updated: Sample) -> "Corpus":
        samples = tuple(updated if s.id == updated.id else s for s in self.samples)
        return Corpus(samples=samples)

    def with_split(self, split: Split) -> List[Sample]:
        return [s for s in self.samples if s.split == split]

    def labels(self) -> List[EmotionLabel]:
        return [s.label for s in self.samples]


# -----------------------------
# Persistence
# -----------------------------
_KNOWN_FIELDS = set(Sample.model_fields)


def _parse_record(record: Dict[str, Any], line_no: int) -> Sample:
    if not isinstance(record, dict):
        raise DataFormatError("record is not a JSON object", line=line_no)
    for key in ("id", "text"):
        if not isinstance(record.get(key), str):
            raise DataFormatError(f"missing or non-string field {key!r}", line=line_no)
    label = record.get("label")
    votes = record.get("votes") or {}
    if label is not None and label not in EmotionLabel._value2member_map_:
        raise DataFormatError("unknown label", line=line_no)
    if not isinstance(votes, dict):
        raise DataFormatError("votes must be an object", line=line_no)
    for vote in votes.values():
        if vote not in EmotionLabel._value2member_map_:
            raise DataFormatError("unknown label", line=line_no)
    data = dict(record)
    data["votes"] = votes
    if data.get("source") is None:
        data.pop("source", None)
    try:
        return Sample.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise DataFormatError(f"invalid field {where}: {first['msg']}", line=line_no) from None


def load_corpus(path: str) -> Corpus:
    """Read a JSON Lines corpus, preserving line order."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise PersistenceError(f"cannot read corpus {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataFormatError.from_decode(path, exc) from None

    samples: List[Sample] = []
    seen = set()
    unknown_fields = 0
    inconsistent = 0
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"malformed JSON ({exc.msg})", line=line_no) from None
        sample = _parse_record(record, line_no)
        if sample.id in seen:
            raise DataFormatError(f"duplicate id {sample.id!r}", line=line_no)
        seen.add(sample.id)
        unknown_fields += len(set(record) - _KNOWN_FIELDS)
        if sample.label is not None and sample.votes and not sample.adjudicated:
            if majority_vote(sample.votes) != sample.label:
                inconsistent += 1
        samples.append(sample)

    if unknown_fields:
        logger.warning("%s: %d unknown field(s) kept as extras", path, unknown_fields)
    if inconsistent:
        logger.warning("%s: %d label(s) disagree with their vote majority", path, inconsistent)
    logger.info("Loaded %d samples from %s", len(samples), path)
    return Corpus(samples=tuple(samples))


def dumps_sample(sample: Sample) -> str:
    return json.dumps(sample.to_record(), ensure_ascii=False)


def save_corpus(corpus: Corpus, path: str) -> None:
    """Write the corpus as JSON Lines (UTF-8, one record per line)."""
    payload = "".join(dumps_sample(s) + "\n" for s in corpus.samples)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(payload)
    except OSError as exc:
        raise PersistenceError(f"cannot write corpus {path}: {exc}") from exc


# -----------------------------
# Annotation
# -----------------------------
def majority_vote(votes: Dict[str, EmotionLabel]) -> Union[EmotionLabel, Unresolved]:
    """Return the label with strictly more votes than any other, else UNRESOLVED."""
    if not votes:
        raise PreconditionError("majority_vote needs at least one vote")
    counts = Counter(EmotionLabel.parse(v) for v in votes.values())
    ranked = counts.most_common()
    if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
        return UNRESOLVED
    return ranked[0][0]


def record_vote(corpus: Corpus, sample_id: str, annotator: str,
                vote: EmotionLabel) -> Corpus:
    """Store (or overwrite) one annotator's vote and relabel once the quorum is met."""
    sample = corpus.get(sample_id)
    votes = dict(sample.votes)
    votes[annotator] = EmotionLabel.parse(vote)
    update: Dict[str, Any] = {"votes": votes}
    if len(votes) >= QUORUM:
        outcome = majority_vote(votes)
        if isinstance(outcome, EmotionLabel):
            update.update(label=outcome, adjudicated=False)
        elif not sample.adjudicated:
            update["label"] = None
    return corpus.replace(sample.model_copy(update=update))


def adjudicate(corpus: Corpus, sample_id: str, label: EmotionLabel,
               annotator: Annotator) -> Corpus:
    """Let a lead annotator settle a sample directly."""
    if not annotator.is_lead:
        raise PreconditionError(f"annotator {annotator.id!r} is not a lead and cannot adjudicate")
    sample = corpus.get(sample_id)
    updated = sample.model_copy(update={"label": EmotionLabel.parse(label), "adjudicated": True})
    return corpus.replace(updated)


def needs_annotation(sample: Sample, annotator: str) -> bool:
    if sample.label is not None:
        return False
    return annotator not in sample.votes


def is_unresolved(sample: Sample) -> bool:
    return (sample.label is None and len(sample.votes) >= QUORUM
            and majority_vote(sample.votes) is UNRESOLVED)


# -----------------------------
# Splitting and statistics
# -----------------------------
def _split_bounds(n: int, ratios: Iterable[float]) -> Tuple[int, int]:
    train, val, _ = ratios
    first = int(np.floor(train * n + 0.5))
    second = int(np.floor((train + val) * n + 0.5))
    return first, max(first, min(second, n))


def stratified_split(corpus: Corpus, spec: Optional[SplitSpec] = None) -> Corpus:
    """
    Assign train/val/test per label.

    Each class is shuffled with one seeded generator (classes visited in label
    order) and cut by cumulative rounding of the ratios.
    """
    spec = spec or SplitSpec()
    unlabeled = [s.id for s in corpus.samples if s.label is None]
    if unlabeled:
        raise PreconditionError(f"{len(unlabeled)} unlabeled sample(s), e.g. {unlabeled[0]!r}")

    rng = np.random.default_rng(spec.seed)
    assignment: Dict[int, Split] = {}
    for label in LABELS:
        members = [i for i, s in enumerate(corpus.samples) if s.label == label]
        if not members:
            continue
        order = rng.permutation(len(members))
        first, second = _split_bounds(len(members), spec.ratios)
        for rank, pos in enumerate(order):
            split = Split.TRAIN if rank < first else Split.VAL if rank < second else Split.TEST
            assignment[members[pos]] = split

    samples = tuple(s.model_copy(update={"split": assignment[i]})
                    for i, s in enumerate(corpus.samples))
    return Corpus(samples=samples)


def word_count(text: str) -> int:
    return len(unicodedata.normalize("NFC", text).split())


def corpus_stats(corpus: Corpus) -> Dict[str, Any]:
    histogram = {label.value: 0 for label in LABELS}
    for sample in corpus.samples:
        if sample.label is not None:
            histogram[sample.label.value] += 1
    return {
        "sentences": len(corpus.samples),
        "words": sum(word_count(s.text) for s in corpus.samples),
        "labeled": sum(histogram.values()),
        "histogram": histogram,
    }
