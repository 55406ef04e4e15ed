"""
Planted-keyword corpora for benchmarks and tests.

Classes come in pairs that share one keyword pool; the first class of a pair
opens its sentences with the keywords and the second closes them, so only
order-aware models can tell a pair apart.
"""
import logging
from typing import List, Optional, Sequence

import numpy as np

from .corpus import LABELS, Corpus, Sample, Source
from .errors import PreconditionError

logger = logging.getLogger(__name__)

KEYWORD_POOLS = (
    ("রাগ", "ক্ষোভ", "বিরক্ত", "ক্রুদ্ধ", "উত্তেজিত", "জ্বালা"),
    ("দুঃখ", "কান্না", "বেদনা", "শোক", "হতাশ", "বিষণ্ণ"),
    ("আনন্দ", "খুশি", "হাসি", "উৎসব", "মজা", "সুন্দর"),
    ("ভয়", "আতঙ্ক", "শঙ্কা", "বিপদ", "চমক", "অবাক"),
)

NOISE_WORDS = (
    "আজ", "কাল", "বাড়ি", "রাস্তা", "বাজার", "মানুষ", "শহর", "গ্রাম", "নদী", "আকাশ",
    "বই", "খবর", "ছবি", "গান", "খেলা", "দোকান", "স্কুল", "অফিস", "বাস", "ট্রেন",
    "চা", "ভাত", "মাছ", "জল", "বৃষ্টি", "রোদ", "সকাল", "বিকেল", "রাত", "সপ্তাহ",
    "বন্ধু", "পরিবার", "শিক্ষক", "ছাত্র", "দেশ", "সরকার", "টাকা", "কাজ", "সময়", "পথ",
)

SOURCES = (Source.FACEBOOK, Source.TWITTER, Source.NEWS, Source.ECOMMERCE)


def planted_sentence(label_index: int, rng: np.random.Generator, keywords: int = 2,
                     noise_range: Sequence[int] = (4, 8)) -> str:
    """One sentence of class ``label_index``: keywords placed before or after noise."""
    pool = KEYWORD_POOLS[label_index // 2]
    planted = [pool[i] for i in rng.choice(len(pool), size=keywords, replace=False)]
    noise = [NOISE_WORDS[i] for i in rng.integers(len(NOISE_WORDS), size=int(rng.integers(*noise_range) + 1))]
    words = planted + noise if label_index % 2 == 0 else noise + planted
    return " ".join(words)


def planted_keyword_corpus(class_sizes: Sequence[int], seed: int = 0, keywords: int = 2) -> Corpus:
    """
    Labelled corpus with ``class_sizes[i]`` sentences of label i.

    Raises:
        PreconditionError: Unless exactly one size per label is given
    """
    if len(class_sizes) != len(LABELS):
        raise PreconditionError(f"expected {len(LABELS)} class sizes, got {len(class_sizes)}")
    if any(size < 0 for size in class_sizes):
        raise PreconditionError("class sizes must be non-negative")
    rng = np.random.default_rng(seed)
    samples: List[Sample] = []
    for label_index, size in enumerate(class_sizes):
        for _ in range(size):
            samples.append(Sample(
                id=f"syn-{len(samples) + 1:05d}",
                text=planted_sentence(label_index, rng, keywords),
                source=SOURCES[len(samples) % len(SOURCES)],
                label=LABELS[label_index],
            ))
    order = rng.permutation(len(samples))
    logger.info("generated %d planted-keyword sentences (seed %d)", len(samples), seed)
    return Corpus(samples=tuple(samples[i] for i in order))


def balanced_corpus(per_class: int = 100, seed: int = 0) -> Corpus:
    return planted_keyword_corpus([per_class] * len(LABELS), seed)


def skewed_corpus(largest: int = 200, smallest: int = 25, seed: int = 0) -> Corpus:
    """Class sizes falling linearly from ``largest`` to ``smallest`` in label order."""
    sizes = np.linspace(largest, smallest, len(LABELS)).round().astype(int)
    return planted_keyword_corpus(sizes.tolist(), seed)


def synthetic_corpus(variant: str = "balanced", seed: int = 0, size: Optional[int] = None) -> Corpus:
    if variant == "balanced":
        return balanced_corpus(size // len(LABELS) if size else 100, seed)
    if variant == "skewed":
        return skewed_corpus(seed=seed)
    raise PreconditionError(f"unknown synthetic variant {variant!r}; choose 'balanced' or 'skewed'")
