"""
Tokenized train/val/test views of a split corpus.
"""
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from .corpus import Corpus, Split
from .errors import PreconditionError
from .textprep import TextPipeline, TokenSeq


@dataclass
class SplitData:
    ids: List[str] = field(default_factory=list)
    docs: List[TokenSeq] = field(default_factory=list)
    labels: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.docs)


def prepare_splits(corpus: Corpus, pipeline: TextPipeline) -> Dict[Split, SplitData]:
    """Normalize every labelled sample and group it by split."""
    missing = [s.id for s in corpus.samples if s.split is None or s.label is None]
    if missing:
        raise PreconditionError(f"{len(missing)} sample(s) lack a split or label, e.g. {missing[0]!r}; "
                                "run split first")
    out: Dict[Split, SplitData] = {}
    for split in Split:
        members = corpus.with_split(split)
        out[split] = SplitData(
            ids=[s.id for s in members],
            docs=[pipeline.apply(s.text) for s in members],
            labels=np.array([s.label.index for s in members], dtype=np.int64),
        )
    if not len(out[Split.TRAIN]):
        raise PreconditionError("the training split is empty")
    return out
