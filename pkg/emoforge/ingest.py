"""
Corpus ingestion from local text, JSON Lines and delimited files.
"""
import csv
import hashlib
import json
import logging
import unicodedata
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple

from pydantic import ValidationError

from .corpus import Corpus, EmotionLabel, Sample, Source
from .errors import DataFormatError, PersistenceError

logger = logging.getLogger(__name__)

FORMATS = {".txt": "txt", ".jsonl": "jsonl", ".csv": "csv", ".tsv": "tsv"}


def sample_id(text: str, position: int, source: Source) -> str:
    """Stable id from the record position and its normalized text."""
    digest = hashlib.sha256(f"{position}\x1f{text}".encode("utf-8")).hexdigest()[:12]
    return f"{source.value}-{digest}"


def _parse_source(value: Optional[str], default: Source, line: int) -> Source:
    if value is None or not str(value).strip():
        return default
    try:
        return Source(str(value).strip().lower())
    except ValueError:
        raise DataFormatError(f"unknown source {value!r}", line=line) from None


def _parse_label(value: Optional[str], line: int) -> Optional[EmotionLabel]:
    if value is None or not str(value).strip():
        return None
    try:
        return EmotionLabel(str(value).strip().lower())
    except ValueError:
        raise DataFormatError(f"unknown label {value!r}", line=line) from None


def _txt_records(lines: List[str]) -> Iterator[Tuple[int, Dict[str, Any]]]:
    for line_no, line in enumerate(lines, start=1):
        yield line_no, {"text": line}


def _jsonl_records(lines: List[str]) -> Iterator[Tuple[int, Dict[str, Any]]]:
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"malformed JSON ({exc.msg})", line=line_no) from None
        if not isinstance(record, dict):
            raise DataFormatError("record is not a JSON object", line=line_no)
        yield line_no, record


def _delimited_records(lines: List[str], delimiter: str) -> Iterator[Tuple[int, Dict[str, Any]]]:
    reader = csv.DictReader(lines, delimiter=delimiter)
    if not reader.fieldnames or "text" not in [f.strip().lower() for f in reader.fieldnames]:
        raise DataFormatError("delimited input needs a header with a 'text' column", line=1)
    for row_no, row in enumerate(reader, start=2):
        yield row_no, {(k or "").strip().lower(): v for k, v in row.items()}


def ingest_file(path: str, source: Source = Source.OTHER, fmt: Optional[str] = None) -> Corpus:
    """
    Read raw sentences into an unlabelled (or pre-labelled) corpus.

    Args:
        path: Input file (.txt one sentence per line, .jsonl records, .csv/.tsv
            with a header holding text and optionally label and source)
        source: Source tag for records that carry none
        fmt: Format override ('txt', 'jsonl', 'csv', 'tsv')

    Returns:
        Corpus in input order; blank sentences are skipped

    Raises:
        DataFormatError: On malformed records
        PersistenceError: If the file cannot be read
    """
    fmt = fmt or FORMATS.get(Path(path).suffix.lower())
    if fmt not in FORMATS.values():
        raise DataFormatError(f"cannot infer input format of {path}; use one of {sorted(FORMATS)}")
    try:
        lines = Path(path).read_text(encoding="utf-8-sig").splitlines()
    except OSError as exc:
        raise PersistenceError(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataFormatError.from_decode(path, exc) from None

    if fmt == "txt":
        records = _txt_records(lines)
    elif fmt == "jsonl":
        records = _jsonl_records(lines)
    else:
        records = _delimited_records(lines, "," if fmt == "csv" else "\t")

    samples: List[Sample] = []
    seen = set()
    skipped = 0
    for line_no, record in records:
        text = record.get("text")
        if not isinstance(text, str):
            raise DataFormatError("missing or non-string text", line=line_no)
        text = unicodedata.normalize("NFC", text.strip())
        if not text:
            skipped += 1
            continue
        src = _parse_source(record.get("source"), source, line_no)
        sid = record.get("id")
        if sid is not None and not isinstance(sid, str):
            raise DataFormatError(f"id must be a string, got {sid!r}", line=line_no)
        sid = sid or sample_id(text, len(samples), src)
        if sid in seen:
            raise DataFormatError(f"duplicate id {sid!r}", line=line_no)
        seen.add(sid)
        label = _parse_label(record.get("label"), line_no)
        try:
            samples.append(Sample(id=sid, text=text, source=src, label=label))
        except ValidationError as exc:
            first = exc.errors()[0]
            where = ".".join(str(p) for p in first["loc"]) or "record"
            raise DataFormatError(f"invalid field {where}: {first['msg']}", line=line_no) from None
    if skipped:
        logger.info("%s: skipped %d blank sentence(s)", path, skipped)
    logger.info("Ingested %d sentences from %s", len(samples), path)
    return Corpus(samples=tuple(samples))
