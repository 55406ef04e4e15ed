"""
Tests for text normalization.
"""
import pytest

from emoforge.errors import DataFormatError
from emoforge.schemas.schema import CleanConfig
from emoforge.textprep import (EmojiMap, StopWordList, TextPipeline, clean_text, load_emoji_map,
                               load_stopwords, map_emojis, read_stopword_entries, remove_stopwords,
                               tokenize)

pytestmark = pytest.mark.unit


class TestCleanText:
    """Test clean_text."""

    def test_removes_markup_urls_digits_punct(self):
        assert clean_text("দাম 500 টাকা! <b>ভাল</b> https://x.com") == "দাম টাকা ভাল"

    def test_empty(self):
        assert clean_text("") == ""

    def test_bengali_digits(self):
        assert clean_text("দাম ৫০০ টাকা") == "দাম টাকা"

    def test_bare_www_url(self):
        assert clean_text("দেখো www.example.com এখন") == "দেখো এখন"

    @pytest.mark.parametrize("raw", [
        "দাম 500 টাকা! <b>ভাল</b> https://x.com",
        "  কি   খবর?? &amp; ১২৩ ",
        "আমি ভালো আছি।",
        "",
    ])
    def test_idempotent(self, raw):
        once = clean_text(raw)
        assert clean_text(once) == once

    def test_vowel_signs_preserved(self):
        """Test matras survive the default configuration."""
        text = "ভালোবাসি কিছু বুঝি"
        assert clean_text(text) == text

    def test_flags_disable_rules(self):
        config = CleanConfig(strip_digits=False, strip_punct=False)
        assert clean_text("দাম 500!", config) == "দাম 500!"

    def test_combining_marks(self):
        config = CleanConfig(combining_marks_to_strip=["্"])
        assert "্" not in clean_text("ক্ষ", config)

    def test_combining_marks_must_be_single_code_points(self):
        with pytest.raises(ValueError):
            CleanConfig(combining_marks_to_strip=["ab"])


class TestMapEmojis:
    """Test map_emojis."""

    def test_smile(self):
        assert map_emojis("😊") == "আনন্দময়"

    def test_gratitude(self):
        """Test the folded-hands entry maps to a gratitude word."""
        assert map_emojis("🙏") == "কৃতজ্ঞতা"

    def test_no_emoji_unchanged(self):
        text = "আমি  ভাল আছি"
        assert map_emojis(text) == text

    def test_unmapped_emoji_dropped(self):
        assert map_emojis("ভাল 🦖 দিন", EmojiMap({})) == "ভাল দিন"

    def test_longest_match_first(self):
        emoji_map = EmojiMap({"😊": "এক", "😊😊": "দুই"})
        assert map_emojis("😊😊😊", emoji_map) == "দুই এক"

    def test_replacement_spaced(self):
        assert map_emojis("ভাল😊দিন", EmojiMap({"😊": "খুশি"})) == "ভাল খুশি দিন"

    def test_empty_key_rejected(self):
        with pytest.raises(DataFormatError):
            EmojiMap({"": "x"})

    def test_bad_map_file(self, write_lines):
        path = write_lines("map.tsv", ["😊 আনন্দ"])
        with pytest.raises(DataFormatError):
            load_emoji_map(path)


class TestTokenize:
    """Test tokenize."""

    def test_words(self):
        assert tokenize("আমি ভাল") == ["আমি", "ভাল"]

    def test_empty(self):
        assert tokenize("") == []

    def test_whitespace_runs(self):
        assert tokenize("  ক   খ ") == ["ক", "খ"]

    def test_residual_punctuation(self):
        assert tokenize("ক।খ") == ["ক", "খ"]


class TestStopWords:
    """Test the stop-word list and its removal."""

    def test_default_list(self):
        entries = read_stopword_entries()
        assert len(entries) == 46
        words = load_stopwords()
        assert len(words) == len(set(entries))
        assert "এই" in words

    def test_remove(self):
        assert remove_stopwords(["এই", "বই", "ভাল"], load_stopwords()) == ["বই", "ভাল"]

    def test_empty_tokens(self):
        assert remove_stopwords([], load_stopwords()) == []

    def test_empty_list(self):
        tokens = ["এই", "বই"]
        assert remove_stopwords(tokens, StopWordList()) == tokens

    def test_invalid_utf8(self, tmp_path):
        stop_path, map_path = tmp_path / "stop.txt", tmp_path / "emoji.tsv"
        stop_path.write_bytes(b"\xc3\x28\n")
        map_path.write_bytes(b"\xf0\x9f\x98\n")
        with pytest.raises(DataFormatError):
            load_stopwords(str(stop_path))
        with pytest.raises(DataFormatError):
            load_emoji_map(str(map_path))

    def test_comments_in_file(self, write_lines):
        path = write_lines("stop.txt", ["# header", "ক  # trailing", "", "খ"])
        assert load_stopwords(path).words == frozenset({"ক", "খ"})


class TestTextPipeline:
    """Test the composed pipeline."""

    def test_order_emoji_before_cleaning(self, text_pipeline):
        """Test emoji words survive punctuation stripping."""
        assert text_pipeline.apply("বই 😊!") == ["বই", "আনন্দময়"]

    def test_idempotent(self, text_pipeline):
        raw = "এই বই 😊 খুব ভাল! 100% <i>সত্যি</i>"
        once = text_pipeline.normalize(raw)
        assert text_pipeline.normalize(once) == once

    def test_survivors_are_subsequence(self, text_pipeline):
        tokens = tokenize(clean_text(map_emojis("এই বই আমি খুব ভাল পড়ি"), CleanConfig()))
        kept = text_pipeline.apply("এই বই আমি খুব ভাল পড়ি")
        it = iter(tokens)
        assert all(token in it for token in kept)
        assert len(kept) <= len(tokens)

    def test_dict_round_trip(self, text_pipeline):
        restored = TextPipeline.from_dict(text_pipeline.to_dict())
        assert restored.apply("এই বই 😊") == text_pipeline.apply("এই বই 😊")
