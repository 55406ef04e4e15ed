"""
Tests for corpus ingestion and the planted-keyword generator.
"""
import json
from collections import Counter

import pytest

from emoforge.corpus import LABELS, EmotionLabel, Source
from emoforge.errors import DataFormatError, PersistenceError, PreconditionError
from emoforge.ingest import ingest_file, sample_id
from emoforge.synthetic import (KEYWORD_POOLS, planted_keyword_corpus, skewed_corpus,
                                synthetic_corpus)

pytestmark = pytest.mark.unit


class TestIngest:
    """Test ingest_file."""

    def test_txt(self, write_lines):
        path = write_lines("raw.txt", ["আমি খুশি", "", "  তুমি কেমন আছ  "])
        corpus = ingest_file(path, Source.FACEBOOK)
        assert [s.text for s in corpus] == ["আমি খুশি", "তুমি কেমন আছ"]
        assert all(s.source is Source.FACEBOOK and s.label is None for s in corpus)
        assert corpus.samples[0].id.startswith("facebook-")

    def test_ids_stable(self, write_lines):
        path = write_lines("raw.txt", ["ক", "খ"])
        assert [s.id for s in ingest_file(path)] == [s.id for s in ingest_file(path)]
        assert sample_id("ক", 0, Source.OTHER) != sample_id("ক", 1, Source.OTHER)

    def test_repeated_sentences_get_distinct_ids(self, write_lines):
        corpus = ingest_file(write_lines("raw.txt", ["ক", "ক"]))
        assert len({s.id for s in corpus}) == 2

    def test_jsonl(self, write_lines):
        path = write_lines("raw.jsonl", [
            json.dumps({"id": "x1", "text": "রাগ হচ্ছে", "label": "anger", "source": "twitter"}),
            json.dumps({"text": "খবর"}),
        ])
        first, second = ingest_file(path).samples
        assert first.id == "x1"
        assert first.label is EmotionLabel.ANGER
        assert first.source is Source.TWITTER
        assert second.source is Source.OTHER

    def test_csv_and_tsv(self, write_lines):
        csv_path = write_lines("raw.csv", ["text,label", "ভয় লাগছে,fear", "দাম কত,"])
        tsv_path = write_lines("raw.tsv", ["Text\tSource", "ভাল বই\tnews"])
        labelled, unlabelled = ingest_file(csv_path).samples
        assert labelled.label is EmotionLabel.FEAR
        assert unlabelled.label is None
        assert ingest_file(tsv_path).samples[0].source is Source.NEWS

    def test_unknown_label(self, write_lines):
        path = write_lines("raw.csv", ["text,label", "ক,joy"])
        with pytest.raises(DataFormatError) as exc_info:
            ingest_file(path)
        assert exc_info.value.line == 2

    def test_missing_text_column(self, write_lines):
        with pytest.raises(DataFormatError):
            ingest_file(write_lines("raw.csv", ["sentence,label", "ক,fear"]))

    def test_malformed_jsonl(self, write_lines):
        with pytest.raises(DataFormatError):
            ingest_file(write_lines("raw.jsonl", ["[1, 2]"]))

    def test_non_string_id(self, write_lines):
        path = write_lines("raw.jsonl", [json.dumps({"id": "x1", "text": "খবর"}),
                                         json.dumps({"id": 5, "text": "আমি খুশি"})])
        with pytest.raises(DataFormatError) as exc_info:
            ingest_file(path)
        assert exc_info.value.line == 2

    def test_invalid_utf8(self, tmp_path):
        path = tmp_path / "raw.txt"
        path.write_bytes("আমি খুশি\n".encode("utf-8") + b"\xff\n")
        with pytest.raises(DataFormatError) as exc_info:
            ingest_file(str(path))
        assert exc_info.value.line == 2

    def test_unknown_format(self, write_lines):
        with pytest.raises(DataFormatError):
            ingest_file(write_lines("raw.xml", ["<s/>"]))
        assert len(ingest_file(write_lines("raw.dat", ["ক"]), fmt="txt")) == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(PersistenceError):
            ingest_file(str(tmp_path / "absent.txt"))

    def test_nfc_normalized(self, write_lines):
        """Test composition-excluded letters come back in canonical decomposed form."""
        corpus = ingest_file(write_lines("raw.txt", ["\u09dc"]))
        assert corpus.samples[0].text == "\u09a1\u09bc"


class TestSynthetic:
    """Test the planted-keyword corpus generator."""

    def test_sizes_and_labels(self):
        corpus = planted_keyword_corpus([3, 1, 0, 2, 1, 1, 1, 1], seed=1)
        counts = Counter(s.label for s in corpus)
        assert counts[LABELS[0]] == 3
        assert counts[LABELS[2]] == 0
        assert len(corpus) == 10
        assert len({s.id for s in corpus}) == 10

    def test_keywords_planted(self):
        corpus = planted_keyword_corpus([5] * 8, seed=3)
        for sample in corpus:
            pool = KEYWORD_POOLS[sample.label.index // 2]
            words = sample.text.split()
            planted = words[:2] if sample.label.index % 2 == 0 else words[-2:]
            assert all(word in pool for word in planted)

    def test_seeded(self):
        assert planted_keyword_corpus([2] * 8, seed=4) == planted_keyword_corpus([2] * 8, seed=4)
        assert planted_keyword_corpus([2] * 8, seed=4) != planted_keyword_corpus([2] * 8, seed=5)

    def test_wrong_size_count(self):
        with pytest.raises(PreconditionError):
            planted_keyword_corpus([1, 2, 3])

    def test_skewed(self):
        counts = Counter(s.label for s in skewed_corpus(largest=40, smallest=5))
        assert counts[LABELS[0]] == 40
        assert counts[LABELS[-1]] == 5

    def test_variants(self):
        assert len(synthetic_corpus("balanced", size=80)) == 80
        with pytest.raises(PreconditionError):
            synthetic_corpus("uniform")
