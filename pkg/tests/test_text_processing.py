"""
クリーニング・トークン化・逆トークン化のテスト
"""

import pytest

from src.config.language_profiles import BUILTIN_PROFILES
from src.models.corpus import ParallelCorpus, SentencePair
from src.models.preprocess import LATIN_DIGITS, NATIVE_DIGITS, CleanConfig
from src.services.preprocess_service import PreprocessService
from src.utils.text_processing import COMMON_PUNCT, JOINERS, TextProcessor


@pytest.fixture
def en_config(en_profile):
    return CleanConfig.for_profile(en_profile)


@pytest.fixture
def hi_config(hi_profile):
    return CleanConfig.for_profile(hi_profile)


class TestCleanLine:
    def test_removes_zero_width_space(self, en_config):
        assert TextProcessor.clean_line("a\u200bb", en_config) == "ab"

    def test_curly_quotes_become_straight(self, en_config):
        assert TextProcessor.clean_line("“hello”", en_config) == '"hello"'

    def test_hindi_digits_are_native(self, hi_config):
        assert TextProcessor.clean_line("वर्ष 2022", hi_config) == "वर्ष २०२२"

    def test_english_digits_are_ascii(self, en_config):
        assert TextProcessor.clean_line("year २०२२", en_config) == "year 2022"

    def test_foreign_script_digits_are_mapped(self, en_config, hi_config):
        assert TextProcessor.clean_line("in २०२२ we", en_config) == "in 2022 we"
        assert TextProcessor.clean_line("वर्ष ২০২২", hi_config) == "वर्ष २०२२"
        assert TextProcessor.clean_line("ஆண்டு ௨௦", hi_config) == "२०"

    def test_collapses_whitespace(self, en_config):
        assert TextProcessor.clean_line("  a  b \t  c ", en_config) == "a b c"

    def test_empty_line(self, en_config):
        assert TextProcessor.clean_line("", en_config) == ""

    def test_deaccents_english_only(self, en_config, hi_config):
        assert TextProcessor.clean_line("café Zürich", en_config) == "cafe Zurich"
        # インド諸語の母音記号は結合文字だが残す
        assert TextProcessor.clean_line("किताब", hi_config) == "किताब"

    def test_deaccent_can_be_disabled(self, en_profile):
        config = CleanConfig.for_profile(en_profile, deaccent=False)
        assert TextProcessor.clean_line("café", config) == "café"

    def test_drops_foreign_script(self, en_config, hi_config):
        assert TextProcessor.clean_line("hello नमस्ते world", en_config) == "hello world"
        assert TextProcessor.clean_line("नमस्ते hello", hi_config) == "नमस्ते"

    def test_punct_map(self, en_config, hi_config):
        assert TextProcessor.clean_line("a—b…", en_config) == "a-b..."
        assert TextProcessor.clean_line("वह गया॥", hi_config) == "वह गया।"

    def test_joiners_kept_on_indic_side(self, hi_config, en_config):
        line = "क्\u200dष"
        assert TextProcessor.clean_line(line, hi_config) == line
        assert TextProcessor.clean_line("a\u200cb", en_config) == "ab"

    def test_digit_override(self, hi_profile):
        config = CleanConfig.for_profile(hi_profile, normalize_digits_to=LATIN_DIGITS)
        assert TextProcessor.clean_line("२०२२", config) == "2022"

    @pytest.mark.parametrize("line", [
        "  “Hello”,\u200b  wörld — २०२२…  ",
        "नमस्ते\u200b दुनिया ॥ 12",
        "\x07tab\tand nbsp",
        "‘quoted’ «text» ‒ 3",
    ])
    @pytest.mark.parametrize("code", ["en", "hi", "ur", "ta"])
    def test_idempotent_and_allowed(self, line, code):
        config = CleanConfig.for_profile(BUILTIN_PROFILES[code])
        cleaned = TextProcessor.clean_line(line, config)
        assert TextProcessor.clean_line(cleaned, config) == cleaned
        for char in cleaned:
            assert (
                char == " "
                or char in COMMON_PUNCT
                or "0" <= char <= "9"
                or char in JOINERS
                or config.profile.in_script(char)
            )

    @pytest.mark.parametrize("code", sorted(BUILTIN_PROFILES))
    def test_digit_mapping_round_trip(self, code):
        profile = BUILTIN_PROFILES[code]
        native = CleanConfig.for_profile(profile, normalize_digits_to=NATIVE_DIGITS)
        latin = CleanConfig.for_profile(profile, normalize_digits_to=LATIN_DIGITS)
        ascii_digits = "0123456789"
        mapped = TextProcessor.normalize_digits(ascii_digits, native)
        assert mapped == profile.digits
        assert TextProcessor.normalize_digits(mapped, latin) == ascii_digits


class TestTokenize:
    def test_detaches_punctuation(self, en_profile):
        assert TextProcessor.tokenize("Hello, world!", en_profile) == ["Hello", ",", "world", "!"]

    def test_danda(self, hi_profile):
        assert TextProcessor.tokenize("वह गया।", hi_profile) == ["वह", "गया", "।"]

    def test_empty(self, en_profile):
        assert TextProcessor.tokenize("", en_profile) == []

    def test_numbers_stay_together(self, en_profile):
        assert TextProcessor.tokenize("pay 3.50 now.", en_profile) == ["pay", "3.50", "now", "."]

    def test_brackets_and_quotes(self, en_profile):
        assert TextProcessor.tokenize('("yes")', en_profile) == ["(", '"', "yes", '"', ")"]

    def test_no_empty_tokens(self, en_profile):
        assert all(TextProcessor.tokenize("... !! a,, (b)", en_profile))


class TestDetokenize:
    def test_inverse_of_detachment(self, en_profile, hi_profile):
        assert TextProcessor.detokenize(["Hello", ",", "world", "!"], en_profile) == "Hello, world!"
        assert TextProcessor.detokenize(["वह", "गया", "।"], hi_profile) == "वह गया।"

    def test_empty(self, en_profile):
        assert TextProcessor.detokenize([], en_profile) == ""

    @pytest.mark.parametrize("line", [
        "Hello, world!",
        "He left (early) today.",
        "Is it 3.50? Yes: done; ok.",
        "वह गया। फिर आया।",
    ])
    def test_round_trip(self, line, en_profile):
        assert TextProcessor.detokenize(TextProcessor.tokenize(line, en_profile), en_profile) == line


class TestRedundantPunct:
    def test_quotes(self):
        assert TextProcessor.strip_redundant_punct(["he", '"', "said", '"']) == ["he", "said"]

    def test_comma(self):
        assert TextProcessor.strip_redundant_punct(["a", ",", "b"]) == ["a", "b"]

    def test_period_kept(self):
        assert TextProcessor.strip_redundant_punct(["a", ".", "b"]) == ["a", ".", "b"]


class TestPreprocessService:
    def test_postprocess(self, en_profile):
        tokens = ["he", "said", ",", '"', "yes", '"', "."]
        assert PreprocessService.postprocess(tokens, en_profile) == "he said yes."

    def test_tokenize_strips_redundant(self, en_profile):
        assert PreprocessService.tokenize('He said, "yes".', en_profile) == ["He", "said", "yes", "."]

    def test_clean_corpus_uses_side_configs(self, hi_config, en_config, hi_profile, en_profile):
        corpus = ParallelCorpus(
            pairs=[SentencePair(source="वर्ष 2022", target="year २०२२", line_no=3)],
            src_profile=hi_profile,
            tgt_profile=en_profile,
        )
        cleaned = PreprocessService.clean_corpus(corpus, hi_config, en_config)
        assert [(p.source, p.target, p.line_no) for p in cleaned] == [("वर्ष २०२२", "year 2022", 3)]
