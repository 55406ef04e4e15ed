"""
Text normalization pipeline: emoji mapping, cleaning, tokenization and
stop-word removal, always applied in that order.
"""
import logging
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Optional

import emoji

from .errors import DataFormatError, PersistenceError
from .schemas.schema import CleanConfig

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_STOPWORDS_PATH = DATA_DIR / "stopwords_bn.txt"
DEFAULT_EMOJI_MAP_PATH = DATA_DIR / "emoji_map.tsv"

TokenSeq = List[str]

_HTML_TAG = re.compile(r"<[^>]*>")
_HTML_ENTITY = re.compile(r"&(?:[A-Za-z]+|#\d+|#x[0-9A-Fa-f]+);")
_URL = re.compile(r"(?:(?:https?|ftp)://|www\.)\S*", re.IGNORECASE)
_DIGITS = re.compile(r"[0-9০-৯]")
_EMOJI_MODIFIERS = re.compile("[\ufe0f\U0001F3FB-\U0001F3FF]")


def _nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] == "P"


def _is_special(ch: str) -> bool:
    return unicodedata.category(ch)[0] in ("P", "S")


# -----------------------------
# Cleaning
# -----------------------------
def clean_text(raw: str, config: Optional[CleanConfig] = None) -> str:
    """Strip markup, URLs, digits and punctuation, then collapse whitespace."""
    config = config or CleanConfig()
    text = _nfc(raw)
    if config.strip_html:
        text = _HTML_ENTITY.sub(" ", _HTML_TAG.sub(" ", text))
    if config.strip_urls:
        text = _URL.sub(" ", text)
    if config.strip_digits:
        text = _DIGITS.sub(" ", text)
    if config.strip_punct:
        text = "".join(" " if _is_special(ch) else ch for ch in text)
    if config.combining_marks_to_strip:
        marks = set(config.combining_marks_to_strip)
        text = "".join(ch for ch in text if ch not in marks)
    return _nfc(" ".join(text.split()))


# -----------------------------
# Emoji mapping
# -----------------------------
@dataclass(frozen=True)
class EmojiMap:
    entries: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for key in self.entries:
            if not key:
                raise DataFormatError("emoji map keys must be non-empty")

    def keys_longest_first(self) -> List[str]:
        return sorted(self.entries, key=lambda k: (-len(k), k))

    def lookup(self, sequence: str) -> Optional[str]:
        if sequence in self.entries:
            return self.entries[sequence]
        bare = _EMOJI_MODIFIERS.sub("", sequence)
        return self.entries.get(bare)


def load_emoji_map(path: Optional[str] = None) -> EmojiMap:
    path = Path(path) if path else DEFAULT_EMOJI_MAP_PATH
    entries: Dict[str, str] = {}
    for line_no, line in enumerate(_read_lines(path), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1].strip():
            raise DataFormatError(f"{path}: expected 'emoji<TAB>word'", line=line_no)
        entries[parts[0]] = _nfc(parts[1].strip())
    return EmojiMap(entries)


def map_emojis(text: str, emoji_map: Optional[EmojiMap] = None) -> str:
    """
    Replace mapped emoji sequences by their word and drop unmapped emoji.

    Map keys are tried longest first; an emoji run found by the emoji
    library is looked up as a whole (with and without presentation and
    skin-tone modifiers) before it is dropped.
    """
    emoji_map = emoji_map if emoji_map is not None else load_emoji_map()
    spans = {m["match_start"]: m["match_end"] for m in emoji.emoji_list(text)}
    keys = emoji_map.keys_longest_first()

    pieces: List[str] = []
    changed = False
    i = 0
    while i < len(text):
        end = spans.get(i)
        key = next((k for k in keys if text.startswith(k, i)
                    and (end is None or i + len(k) > end)), None)
        if key is not None:
            pieces.append(f" {emoji_map.entries[key]} ")
            i += len(key)
            changed = True
            continue
        if end is not None:
            word = emoji_map.lookup(text[i:end])
            if word is None:
                # a shorter key may still cover the front of the run
                key = next((k for k in keys if text.startswith(k, i)), None)
                word = emoji_map.entries[key] if key else None
            if word is not None:
                pieces.append(f" {word} ")
            i = end
            changed = True
            continue
        pieces.append(text[i])
        i += 1
    result = "".join(pieces)
    return " ".join(result.split()) if changed else result


# -----------------------------
# Tokens and stop words
# -----------------------------
def tokenize(text: str) -> TokenSeq:
    """Split on whitespace and any punctuation that survived cleaning."""
    tokens: TokenSeq = []
    current: List[str] = []
    for ch in _nfc(text):
        if ch.isspace() or _is_punct(ch):
            if current:
                tokens.append("".join(current))
                current = []
        else:
            current.append(ch)
    if current:
        tokens.append("".join(current))
    return tokens


@dataclass(frozen=True)
class StopWordList:
    words: FrozenSet[str] = frozenset()

    @classmethod
    def of(cls, words: Iterable[str]) -> "StopWordList":
        return cls(frozenset(_nfc(w) for w in words if w))

    def __contains__(self, token: str) -> bool:
        return token in self.words

    def __len__(self) -> int:
        return len(self.words)


def read_stopword_entries(path: Optional[str] = None) -> List[str]:
    """All entries of a stop-word file in file order, duplicates kept."""
    path = Path(path) if path else DEFAULT_STOPWORDS_PATH
    entries = []
    for line in _read_lines(path):
        token = line.split("#", 1)[0].strip()
        if token:
            entries.append(_nfc(token))
    return entries


def load_stopwords(path: Optional[str] = None) -> StopWordList:
    entries = read_stopword_entries(path)
    words = StopWordList.of(entries)
    if len(words) < len(entries):
        logger.info("Stop-word list has %d duplicate entries; kept %d unique",
                    len(entries) - len(words), len(words))
    return words


def remove_stopwords(tokens: TokenSeq, stopwords: StopWordList) -> TokenSeq:
    return [t for t in tokens if t not in stopwords]


def _read_lines(path: Path) -> List[str]:
    try:
        return path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise PersistenceError(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataFormatError.from_decode(str(path), exc) from None


# -----------------------------
# Composed pipeline
# -----------------------------
@dataclass(frozen=True)
class TextPipeline:
    """map_emojis -> clean_text -> tokenize -> remove_stopwords."""
    clean: CleanConfig = field(default_factory=CleanConfig)
    emoji_map: EmojiMap = field(default_factory=load_emoji_map)
    stopwords: StopWordList = field(default_factory=load_stopwords)

    @classmethod
    def from_paths(cls, clean: Optional[CleanConfig] = None, stopwords_path: Optional[str] = None,
                   emoji_map_path: Optional[str] = None) -> "TextPipeline":
        return cls(clean=clean or CleanConfig(),
                   emoji_map=load_emoji_map(emoji_map_path),
                   stopwords=load_stopwords(stopwords_path))

    def apply(self, text: str) -> TokenSeq:
        cleaned = clean_text(map_emojis(text, self.emoji_map), self.clean)
        return remove_stopwords(tokenize(cleaned), self.stopwords)

    def normalize(self, text: str) -> str:
        return " ".join(self.apply(text))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "clean": self.clean.model_dump(),
            "emoji_map": dict(sorted(self.emoji_map.entries.items())),
            "stopwords": sorted(self.stopwords.words),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TextPipeline":
        return cls(clean=CleanConfig.model_validate(data.get("clean", {})),
                   emoji_map=EmojiMap(dict(data.get("emoji_map", {}))),
                   stopwords=StopWordList.of(data.get("stopwords", [])))
