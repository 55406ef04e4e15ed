"""
emoforge command-line interface.

    python -m emoforge <subcommand> [options]

Exit codes: 0 ok, 1 usage, 2 data format, 3 training/boosting, 4 I/O.
"""
import argparse
import json
import logging
import os
import sys
import time
from typing import Any, Callable, Dict, List, Optional, TextIO

from dotenv import find_dotenv, load_dotenv
from pydantic import ValidationError

from . import __version__
from .artifact import load_artifact, save_artifact, train_pipeline
from .corpus import (
    LABELS,
    Annotator,
    Corpus,
    EmotionLabel,
    Source,
    Split,
    adjudicate,
    corpus_stats,
    is_unresolved,
    load_corpus,
    needs_annotation,
    record_vote,
    save_corpus,
    stratified_split,
)
from .errors import (
    BalancingError,
    DataFormatError,
    DimensionError,
    EmoforgeError,
    NumericError,
    PersistenceError,
    PreconditionError,
    SampleNotFoundError,
    StateError,
    TrainingError,
)
from .evalkit import balancing_report, evaluate_predictions, run_grid, write_grid_csv, write_json_report
from .ingest import ingest_file
from .schemas.schema import EmoforgeConfig, GridSpec, RunManifest, file_digest, resolve_config
from .synthetic import synthetic_corpus
from .textprep import TextPipeline

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_TRAINING, EXIT_IO = 0, 1, 2, 3, 4
MODEL_CHOICES = ("nb", "dt", "rf", "svm", "rnn", "lstm", "hybrid", "ensemble")
FEATURE_CHOICES = ("count", "tfidf", "skipgram", "subword", "contextual")
SKIP_WORDS = ("s", "skip")
QUIT_WORDS = ("q", "quit")


class UsageError(Exception):
    """Bad command-line usage."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -----------------------------
# Shared helpers
# -----------------------------
def _load_json(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise PersistenceError(f"cannot read config {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataFormatError.from_decode(path, exc) from None
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"config {path} is not valid JSON ({exc.msg})", line=exc.lineno) from None
    if not isinstance(data, dict):
        raise DataFormatError(f"config {path} must hold a JSON object")
    return data


def _settings(args: argparse.Namespace, overrides: Optional[Dict[str, Any]] = None) -> EmoforgeConfig:
    file_config = _load_json(args.config) if getattr(args, "config", None) else None
    flags: Dict[str, Any] = dict(overrides or {})
    textprep = {}
    if getattr(args, "stopwords", None):
        textprep["stopwords_path"] = args.stopwords
    if getattr(args, "emoji_map", None):
        textprep["emoji_map_path"] = args.emoji_map
    if textprep:
        flags["textprep"] = textprep
    try:
        return resolve_config(file_config, flags)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise PreconditionError(f"invalid configuration at {where}: {first['msg']}") from None


def _text_pipeline(settings: EmoforgeConfig) -> TextPipeline:
    prep = settings.textprep
    return TextPipeline.from_paths(prep.clean, prep.stopwords_path, prep.emoji_map_path)


def _manifest(command: str, settings: Optional[EmoforgeConfig], inputs: List[str],
              seeds: Optional[Dict[str, int]] = None, **extra: Any) -> RunManifest:
    digests = {}
    for path in inputs:
        if path:
            try:
                digests[os.path.basename(path)] = file_digest(path)
            except OSError as exc:
                raise PersistenceError(f"cannot read {path}: {exc}") from exc
    return RunManifest(tool_version=__version__, subcommand=command,
                       config=settings.model_dump() if settings else {},
                       seeds=seeds or {}, input_digests=digests, extra=extra)


def _seed_overrides(seed: Optional[int]) -> Dict[str, Any]:
    if seed is None:
        return {}
    return {"train": {"seed": seed}, "boost": {"seed": seed}, "smote": {"seed": seed}}


def _env_seed() -> Optional[int]:
    value = os.getenv("EMOFORGE_SEED")
    try:
        return int(value) if value else None
    except ValueError:
        raise UsageError(f"EMOFORGE_SEED must be an integer, got {value!r}") from None


def _default_seed() -> int:
    seed = _env_seed()
    return 0 if seed is None else seed


def _csv_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _ratios(value: str) -> List[float]:
    try:
        ratios = [float(v) for v in _csv_list(value)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"ratios must be three numbers, got {value!r}") from None
    if len(ratios) != 3:
        raise argparse.ArgumentTypeError(f"ratios must be three numbers, got {value!r}")
    return ratios


def _labeled_subset(corpus: Corpus) -> Corpus:
    """Test split when the corpus is split, otherwise every labelled sample."""
    test = corpus.with_split(Split.TEST)
    samples = test if test else [s for s in corpus.samples if s.label is not None]
    return Corpus(samples=tuple(s for s in samples if s.label is not None))


# -----------------------------
# Subcommands
# -----------------------------
def cmd_ingest(args, stdin, stdout) -> int:
    corpus = ingest_file(args.input, Source(args.source), args.format)
    save_corpus(corpus, args.output)
    stdout.write(f"ingested {len(corpus)} sentences into {args.output}\n")
    return EXIT_OK


def _prompt_label(stdin: TextIO, stdout: TextIO, prompt: str) -> Optional[str]:
    """Read one answer; '' means skip, None means quit or end of input."""
    while True:
        stdout.write(prompt)
        stdout.flush()
        line = stdin.readline()
        if not line:
            return None
        answer = line.strip().lower()
        if answer in QUIT_WORDS:
            return None
        if answer in SKIP_WORDS or not answer:
            return ""
        if answer.isdigit() and 1 <= int(answer) <= len(LABELS):
            return LABELS[int(answer) - 1].value
        if answer in EmotionLabel._value2member_map_:
            return answer
        stdout.write(f"unknown label {answer!r}\n")


def cmd_annotate(args, stdin, stdout) -> int:
    corpus = load_corpus(args.corpus)
    annotator = Annotator(id=args.annotator, role="lead" if args.lead else "annotator")
    menu = "  ".join(f"{i}={label.value}" for i, label in enumerate(LABELS, start=1))
    stdout.write(f"labels: {menu}  (s=skip, q=quit)\n")
    voted = settled = 0
    stopped = False
    for sample in list(corpus.samples):
        current = corpus.get(sample.id)
        if annotator.is_lead and is_unresolved(current):
            votes = ", ".join(f"{k}={v.value}" for k, v in sorted(current.votes.items()))
            stdout.write(f"\n[{current.id}] UNRESOLVED ({votes})\n{current.text}\n")
            answer = _prompt_label(stdin, stdout, "adjudicate> ")
            if answer is None:
                stopped = True
                break
            if answer:
                corpus = adjudicate(corpus, current.id, EmotionLabel(answer), annotator)
                settled += 1
            continue
        if not needs_annotation(current, annotator.id):
            continue
        stdout.write(f"\n[{current.id}] {current.text}\n")
        answer = _prompt_label(stdin, stdout, "label> ")
        if answer is None:
            stopped = True
            break
        if answer:
            corpus = record_vote(corpus, current.id, annotator.id, EmotionLabel(answer))
            voted += 1
            if is_unresolved(corpus.get(current.id)):
                logger.warning("sample %s is unresolved and awaits a lead annotator", current.id)

    output = args.output or args.corpus
    save_corpus(corpus, output)
    pending = sum(is_unresolved(s) for s in corpus.samples)
    stdout.write(f"\n{voted} vote(s), {settled} adjudication(s){' (stopped early)' if stopped else ''}; "
                 f"{pending} unresolved; saved {output}\n")
    return EXIT_OK


def cmd_preprocess(args, stdin, stdout) -> int:
    settings = _settings(args)
    pipeline = _text_pipeline(settings)
    corpus = load_corpus(args.corpus)
    records = []
    for sample in corpus.samples:
        record = sample.to_record()
        record["tokens"] = pipeline.apply(sample.text)
        records.append(record)
    payload = "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)
    try:
        with open(args.output, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(payload)
    except OSError as exc:
        raise PersistenceError(f"cannot write {args.output}: {exc}") from exc
    stdout.write(f"normalized {len(records)} sentences into {args.output}\n")
    return EXIT_OK


def cmd_split(args, stdin, stdout) -> int:
    split = {}
    if args.ratios is not None:
        split["ratios"] = args.ratios
    if args.seed is not None:
        split["seed"] = args.seed
    settings = _settings(args, {"split": split} if split else None)
    corpus = stratified_split(load_corpus(args.corpus), settings.split)
    save_corpus(corpus, args.output)
    counts = {s.value: len(corpus.with_split(s)) for s in Split}
    stdout.write(json.dumps(counts) + "\n")
    return EXIT_OK


def cmd_train(args, stdin, stdout) -> int:
    explicit = args.seed if args.seed is not None else _env_seed()
    seed = 0 if explicit is None else explicit
    settings = _settings(args, _seed_overrides(explicit))
    corpus = load_corpus(args.corpus)
    manifest = _manifest("train", settings, [args.corpus, args.config],
                         {"model": seed}, feature=args.features, model=args.model, balanced=args.balance)
    pipeline = train_pipeline(corpus, _text_pipeline(settings), args.features, args.model,
                              settings, args.balance, seed, manifest)
    save_artifact(pipeline, args.out, args.omit_timing)
    stdout.write(f"trained {args.model} over {args.features} features; saved {args.out}\n")
    return EXIT_OK


def cmd_evaluate(args, stdin, stdout, clock: Callable[[], float] = time.perf_counter) -> int:
    pipeline = load_artifact(args.model)
    subset = _labeled_subset(load_corpus(args.corpus))
    if not len(subset):
        raise PreconditionError("no labelled samples to evaluate")
    started = clock()
    predicted = pipeline.predict_texts([s.text for s in subset.samples])
    elapsed = clock() - started
    report = evaluate_predictions([s.label for s in subset.samples], predicted)
    report.timings = {"predict": elapsed}
    manifest = _manifest("evaluate", None, [args.model, args.corpus])
    report.manifest_sha256 = manifest.digest()
    data = report.to_dict(args.omit_timing)
    data["manifest"] = manifest.model_dump(exclude={"timestamp"} if args.omit_timing else None)
    data["model_manifest_sha256"] = pipeline.manifest.digest() if pipeline.manifest else None
    write_json_report(data, args.report)
    stdout.write(f"accuracy={report.accuracy:.4f} macro_f1={report.f1:.4f} "
                 f"({len(subset)} samples); report {args.report}\n")
    return EXIT_OK


def cmd_grid(args, stdin, stdout) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    settings = _settings(args)
    try:
        spec = GridSpec(features=_csv_list(args.features), models=_csv_list(args.models),
                        seed=seed, balance=args.balance)
    except ValidationError as exc:
        raise PreconditionError(f"invalid grid: {exc.errors()[0]['msg']}") from None
    corpus = load_corpus(args.corpus)
    text = _text_pipeline(settings)
    if args.balance_study:
        result = balancing_report(corpus, spec, settings, text)
    else:
        result = run_grid(corpus, spec, settings, text)
    manifest = _manifest("grid", settings, [args.corpus, args.config], {"grid": seed},
                         features=spec.features, models=spec.models,
                         balance_study=args.balance_study, balanced=spec.balance)
    write_grid_csv(result, args.out, manifest, args.omit_timing)
    if args.json:
        write_json_report(result.to_dict(manifest, args.omit_timing), args.json)
    failed = sum(not r.ok for r in result.rows)
    stdout.write(f"wrote {len(result.rows)} rows to {args.out}"
                 f"{f' ({failed} failed)' if failed else ''}\n")
    return EXIT_OK


def cmd_predict(args, stdin, stdout) -> int:
    pipeline = load_artifact(args.model)
    if args.proba:
        stdout.write(json.dumps(pipeline.predict_distribution(args.text), ensure_ascii=False) + "\n")
    else:
        stdout.write(pipeline.predict_text(args.text).value + "\n")
    return EXIT_OK


def cmd_stats(args, stdin, stdout) -> int:
    stats = corpus_stats(load_corpus(args.corpus))
    stdout.write(json.dumps(stats, ensure_ascii=False, indent=2) + "\n")
    return EXIT_OK


def cmd_synth(args, stdin, stdout) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    corpus = synthetic_corpus(args.variant, seed, args.size)
    save_corpus(corpus, args.output)
    stdout.write(f"generated {len(corpus)} {args.variant} sentences into {args.output}\n")
    return EXIT_OK


# -----------------------------
# Parser and dispatch
# -----------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="emoforge", description="Bengali text emotion detection toolkit")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--version", action="version", version=f"emoforge {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="<subcommand>")

    p = sub.add_parser("ingest", help="read raw sentences into a JSONL corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--source", default=Source.OTHER.value, choices=[s.value for s in Source])
    p.add_argument("--format", default=None, choices=["txt", "jsonl", "csv", "tsv"])
    p.set_defaults(handler=cmd_ingest)

    p = sub.add_parser("annotate", help="interactive majority-vote annotation")
    p.add_argument("--corpus", required=True)
    p.add_argument("--annotator", required=True)
    p.add_argument("--lead", action="store_true", help="adjudicate unresolved samples")
    p.add_argument("--output", default=None, help="write here instead of updating --corpus")
    p.set_defaults(handler=cmd_annotate)

    p = sub.add_parser("preprocess", help="normalize and tokenize every sentence")
    p.add_argument("--corpus", required=True)
    p.add_argument("--stopwords", default=None)
    p.add_argument("--emoji-map", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(handler=cmd_preprocess)

    p = sub.add_parser("split", help="stratified train/val/test assignment")
    p.add_argument("--corpus", required=True)
    p.add_argument("--ratios", type=_ratios, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(handler=cmd_split)

    p = sub.add_parser("train", help="fit a feature/model pipeline")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True, choices=MODEL_CHOICES)
    p.add_argument("--features", required=True, choices=FEATURE_CHOICES)
    p.add_argument("--balance", action="store_true", help="SMOTE the training split")
    p.add_argument("--config", default=None)
    p.add_argument("--stopwords", default=None)
    p.add_argument("--emoji-map", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--omit-timing", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("evaluate", help="score a trained model on labelled data")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--omit-timing", action="store_true")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("grid", help="feature x model comparison")
    p.add_argument("--corpus", required=True)
    p.add_argument("--features", default=",".join(FEATURE_CHOICES))
    p.add_argument("--models", default=",".join(MODEL_CHOICES))
    p.add_argument("--balance", action="store_true", help="SMOTE every cell")
    p.add_argument("--balance-study", action="store_true", help="run every cell without and with SMOTE")
    p.add_argument("--config", default=None)
    p.add_argument("--stopwords", default=None)
    p.add_argument("--emoji-map", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--omit-timing", action="store_true")
    p.add_argument("--json", default=None, help="also write the full JSON report here")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_grid)

    p = sub.add_parser("predict", help="label one sentence")
    p.add_argument("--model", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--proba", action="store_true", help="print the class distribution")
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("stats", help="corpus size and label histogram")
    p.add_argument("--corpus", required=True)
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("synth", help="generate a planted-keyword corpus")
    p.add_argument("--variant", default="balanced", choices=["balanced", "skewed"])
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(handler=cmd_synth)
    return parser


def _configure_logging(level_name: Optional[str], stream: TextIO) -> None:
    level_name = (level_name or os.getenv("EMOFORGE_LOG_LEVEL") or "WARNING").upper()
    level = logging.getLevelName(level_name)
    if not isinstance(level, int):
        raise UsageError(f"unknown log level {level_name!r}")
    logging.basicConfig(level=level, stream=stream,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    logging.getLogger("emoforge").setLevel(level)


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (UsageError, PreconditionError)):
        return EXIT_USAGE
    if isinstance(exc, (DataFormatError, SampleNotFoundError)):
        return EXIT_DATA
    if isinstance(exc, (TrainingError, BalancingError, NumericError, DimensionError, StateError)):
        return EXIT_TRAINING
    if isinstance(exc, (PersistenceError, OSError)):
        return EXIT_IO
    return EXIT_USAGE


def run_cli(argv: Optional[List[str]] = None, stdin: TextIO = None, stdout: TextIO = None,
            stderr: TextIO = None) -> int:
    """Parse ``argv``, run one subcommand and return its exit code."""
    stdin, stdout, stderr = stdin or sys.stdin, stdout or sys.stdout, stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    load_dotenv(find_dotenv(), override=True)
    parser = build_parser()
    if not argv:
        stderr.write(parser.format_usage())
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
        if getattr(args, "handler", None) is None:
            stderr.write(parser.format_usage())
            return EXIT_USAGE
        _configure_logging(args.log_level, stderr)
        return args.handler(args, stdin, stdout)
    except SystemExit as exc:
        # --help / --version
        return int(exc.code or 0)
    except (UsageError, EmoforgeError, OSError) as exc:
        code = exit_code_for(exc)
        stderr.write(f"emoforge: error: {exc}\n")
        logger.debug("command failed", exc_info=True)
        return code


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
