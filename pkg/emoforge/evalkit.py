"""
Evaluation: confusion matrices, macro-averaged metrics, the feature x model
grid and the SMOTE before/after study.
"""
import csv
import hashlib
import io
import json
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from .artifact import fit_model, featurize
from .corpus import LABELS, Corpus, EmotionLabel, Split
from .errors import EmoforgeError, PersistenceError, PreconditionError
from .features.factory import FeaturizerFactory
from .schemas.schema import EmoforgeConfig, GridSpec, RunManifest
from .splits import SplitData, prepare_splits
from .textprep import TextPipeline

logger = logging.getLogger(__name__)

Clock = Callable[[], float]
METRICS = ("precision", "recall", "f1", "accuracy")
CSV_COLUMNS = ("feature", "model", "balanced", "precision", "recall", "f1", "accuracy", "seconds", "flags")


# -----------------------------
# Confusion matrix and metrics
# -----------------------------
@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are true classes, columns predicted classes."""
    counts: np.ndarray
    labels: Tuple[Hashable, ...]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_dict(self) -> Dict[str, Any]:
        return {"labels": [str(getattr(l, "value", l)) for l in self.labels],
                "counts": self.counts.astype(int).tolist()}


def _label_space(y_true: Sequence[Hashable], y_pred: Sequence[Hashable]) -> Tuple[Hashable, ...]:
    values = list(y_true) + list(y_pred)
    if any(isinstance(v, EmotionLabel) for v in values):
        return LABELS
    return tuple(sorted(set(values)))


def confusion_matrix(y_true: Sequence[Hashable], y_pred: Sequence[Hashable],
                     labels: Optional[Sequence[Hashable]] = None) -> ConfusionMatrix:
    """
    Tally (true, predicted) pairs.

    Args:
        y_true: True labels
        y_pred: Predicted labels, same length
        labels: Label order; the eight emotion labels when EmotionLabels are
            given, otherwise the sorted union of the observed labels

    Raises:
        PreconditionError: On empty or mismatched inputs
    """
    y_true, y_pred = list(y_true), list(y_pred)
    if len(y_true) != len(y_pred):
        raise PreconditionError(f"{len(y_true)} true labels but {len(y_pred)} predictions")
    if not y_true:
        raise PreconditionError("cannot build a confusion matrix from no samples")
    labels = tuple(labels) if labels is not None else _label_space(y_true, y_pred)
    position = {label: i for i, label in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        if t not in position or p not in position:
            raise PreconditionError(f"label {t if t not in position else p!r} outside the label space")
        counts[position[t], position[p]] += 1
    return ConfusionMatrix(counts, labels)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int
    flags: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1,
                "support": self.support, "flags": list(self.flags)}


def _ratio(num: int, den: int) -> Tuple[Fraction, bool]:
    return (Fraction(num, den), True) if den else (Fraction(0), False)


@dataclass
class MetricsReport:
    """Macro-averaged scores over the classes present among the true labels."""
    accuracy: float
    precision: float
    recall: float
    f1: float
    per_class: Dict[str, ClassMetrics]
    confusion: ConfusionMatrix
    timings: Dict[str, float] = field(default_factory=dict)
    manifest_sha256: Optional[str] = None
    averaging: str = "macro"

    @property
    def seconds(self) -> float:
        return float(sum(self.timings.values()))

    @property
    def minutes(self) -> float:
        return self.seconds / 60.0

    @property
    def flagged(self) -> bool:
        return any(m.flags for m in self.per_class.values())

    def to_dict(self, omit_timing: bool = False) -> Dict[str, Any]:
        return {
            "averaging": self.averaging,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "per_class": {k: v.to_dict() for k, v in self.per_class.items()},
            "confusion": self.confusion.to_dict(),
            "timings": None if omit_timing else dict(self.timings),
            "seconds": None if omit_timing else self.seconds,
            "minutes": None if omit_timing else self.minutes,
            "manifest_sha256": self.manifest_sha256,
        }


def metrics_from_confusion(cm: ConfusionMatrix) -> MetricsReport:
    """
    Per-class precision/recall/F1 and their macro means.

    Undefined ratios (0/0) count as 0 and are flagged; classes with no true
    samples stay out of the macro mean.
    """
    counts = cm.counts.astype(np.int64)
    total = int(counts.sum())
    if total <= 0:
        raise PreconditionError("confusion matrix is empty")
    per_class: Dict[str, ClassMetrics] = {}
    included: List[Tuple[Fraction, Fraction, Fraction]] = []
    for i, label in enumerate(cm.labels):
        tp = int(counts[i, i])
        predicted, support = int(counts[:, i].sum()), int(counts[i, :].sum())
        precision, p_ok = _ratio(tp, predicted)
        recall, r_ok = _ratio(tp, support)
        if precision + recall:
            f1, f_ok = 2 * precision * recall / (precision + recall), True
        else:
            f1, f_ok = Fraction(0), False
        flags = tuple(name for name, ok in (("precision_undefined", p_ok), ("recall_undefined", r_ok),
                                            ("f1_undefined", f_ok)) if not ok)
        per_class[str(getattr(label, "value", label))] = ClassMetrics(
            float(precision), float(recall), float(f1), support, flags)
        if support:
            included.append((precision, recall, f1))

    def macro(j: int) -> float:
        return float(sum(row[j] for row in included) / len(included))

    return MetricsReport(
        accuracy=float(Fraction(int(np.trace(counts)), total)),
        precision=macro(0),
        recall=macro(1),
        f1=macro(2),
        per_class=per_class,
        confusion=cm,
    )


def evaluate_predictions(y_true: Sequence[Hashable], y_pred: Sequence[Hashable],
                         labels: Optional[Sequence[Hashable]] = None) -> MetricsReport:
    return metrics_from_confusion(confusion_matrix(y_true, y_pred, labels))


# -----------------------------
# Grid runner
# -----------------------------
def cell_seed(master: int, feature: str, model: str) -> int:
    digest = hashlib.sha256(f"{master}:{feature}:{model}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % (2 ** 31 - 1)


@dataclass
class GridRow:
    feature: str
    model: str
    balanced: bool
    seed: int
    metrics: Optional[MetricsReport] = None
    interpretation: bool = False
    error: Optional[str] = None
    smote: Optional[Dict[str, Any]] = None

    @property
    def ok(self) -> bool:
        return self.metrics is not None

    @property
    def flags(self) -> str:
        names = []
        if self.interpretation:
            names.append("interpretation")
        if not self.ok:
            names.append("failed")
        return ";".join(names)

    def to_dict(self, omit_timing: bool = False) -> Dict[str, Any]:
        return {
            "feature": self.feature,
            "model": self.model,
            "balanced": self.balanced,
            "seed": self.seed,
            "status": "ok" if self.ok else "failed",
            "interpretation": self.interpretation,
            "error": self.error,
            "metrics": self.metrics.to_dict(omit_timing) if self.metrics else None,
            "smote": self.smote,
        }


@dataclass
class GridResult:
    rows: List[GridRow]
    spec: GridSpec
    deltas: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self, manifest: Optional[RunManifest] = None, omit_timing: bool = False) -> Dict[str, Any]:
        data = {
            "manifest_sha256": manifest.digest() if manifest else None,
            "manifest": manifest.model_dump(exclude={"timestamp"} if omit_timing else None) if manifest else None,
            "averaging": "macro",
            "spec": self.spec.model_dump(),
            "rows": [r.to_dict(omit_timing) for r in self.rows],
        }
        if self.deltas:
            data["deltas"] = self.deltas
        return data


def _run_cells(feature_kind: str, models: Sequence[str], splits: Dict[Split, SplitData],
               settings: EmoforgeConfig, master_seed: int, balanced: bool, clock: Clock) -> List[GridRow]:
    train, val, test = splits[Split.TRAIN], splits[Split.VAL], splits[Split.TEST]
    rows = [GridRow(feature_kind, m, balanced, cell_seed(master_seed, feature_kind, m)) for m in models]
    started = clock()
    try:
        featurizer = FeaturizerFactory.from_settings(feature_kind, settings)
        featurizer.fit(train.docs, train.labels, val.docs, val.labels)
    except EmoforgeError as exc:
        logger.warning("grid: %s features failed: %s", feature_kind, exc)
        for row in rows:
            row.error = f"{type(exc).__name__}: {exc}"
        return rows
    fit_seconds = clock() - started

    for row in rows:
        logger.info("grid cell %s x %s (balanced=%s, seed=%d)", row.feature, row.model, balanced, row.seed)
        try:
            if not len(test):
                raise PreconditionError("the test split is empty")
            t0 = clock()
            fitted = fit_model(featurizer, row.model, train, val, settings, row.seed, balanced)
            t1 = clock()
            predictions = fitted.model.predict(featurize(featurizer, test.docs, fitted.input_style))
            t2 = clock()
        except EmoforgeError as exc:
            logger.warning("grid cell %s x %s failed: %s", row.feature, row.model, exc)
            row.error = f"{type(exc).__name__}: {exc}"
            continue
        row.interpretation = fitted.interpretation
        row.smote = fitted.smote_report
        report = evaluate_predictions([LABELS[i] for i in test.labels], [LABELS[i] for i in predictions])
        report.timings = {"featurize": fit_seconds, "train": t1 - t0, "predict": t2 - t1}
        row.metrics = report
    return rows


def run_grid(corpus: Corpus, spec: GridSpec, settings: Optional[EmoforgeConfig] = None,
             text: Optional[TextPipeline] = None, clock: Clock = time.perf_counter,
             balanced: Optional[bool] = None) -> GridResult:
    """
    Evaluate every (feature, model) pair on the test split, features outer,
    models inner. A failing cell is recorded and the grid continues.
    """
    settings = settings or EmoforgeConfig()
    text = text or TextPipeline()
    balanced = spec.balance if balanced is None else balanced
    splits = prepare_splits(corpus, text)
    rows: List[GridRow] = []
    for feature_kind in spec.features:
        rows.extend(_run_cells(feature_kind, spec.models, splits, settings, spec.seed, balanced, clock))
    failures = sum(not r.ok for r in rows)
    if failures:
        logger.warning("grid finished with %d failed cell(s) of %d", failures, len(rows))
    return GridResult(rows, spec)


def metric_deltas(before: GridRow, after: GridRow) -> Dict[str, Any]:
    delta = {"feature": before.feature, "model": before.model}
    for name in METRICS:
        if before.ok and after.ok:
            delta[name] = getattr(after.metrics, name) - getattr(before.metrics, name)
        else:
            delta[name] = None
    return delta


def balancing_report(corpus: Corpus, spec: GridSpec, settings: Optional[EmoforgeConfig] = None,
                     text: Optional[TextPipeline] = None, clock: Clock = time.perf_counter) -> GridResult:
    """Each cell without and with SMOTE on the training split; deltas are after - before."""
    plain = run_grid(corpus, spec, settings, text, clock, balanced=False)
    smoted = run_grid(corpus, spec, settings, text, clock, balanced=True)
    rows: List[GridRow] = []
    deltas: List[Dict[str, Any]] = []
    for before, after in zip(plain.rows, smoted.rows):
        rows.extend([before, after])
        deltas.append(metric_deltas(before, after))
    return GridResult(rows, spec, deltas)


# -----------------------------
# Report writers
# -----------------------------
def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6f}"


def grid_csv(result: GridResult, manifest: Optional[RunManifest] = None, omit_timing: bool = False) -> str:
    buffer = io.StringIO()
    if manifest is not None:
        buffer.write(f"# manifest_sha256={manifest.digest()} averaging=macro\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in result.rows:
        m = row.metrics
        writer.writerow([
            row.feature, row.model, "true" if row.balanced else "false",
            _fmt(m.precision if m else None), _fmt(m.recall if m else None),
            _fmt(m.f1 if m else None), _fmt(m.accuracy if m else None),
            "" if omit_timing or m is None else _fmt(m.seconds),
            row.flags,
        ])
    return buffer.getvalue()


def _write(path: str, payload: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(payload)
    except OSError as exc:
        raise PersistenceError(f"cannot write report {path}: {exc}") from exc


def write_grid_csv(result: GridResult, path: str, manifest: Optional[RunManifest] = None,
                   omit_timing: bool = False) -> None:
    _write(path, grid_csv(result, manifest, omit_timing))


def write_json_report(data: Dict[str, Any], path: str) -> None:
    _write(path, json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n")
