"""
スタックデコーダのテスト
"""

import itertools
import math
import random

import pytest

from src.exceptions import ValidationError
from src.models.decoding import (
    DecoderConfig,
    Derivation,
    DerivationStep,
    Features,
    FeatureWeights,
    TranslationModels,
)
from src.models.phrase import PhraseScores, PhraseTable
from src.services.decoder_service import DecoderService, reordering_cost
from src.services.language_model_service import LanguageModelService

UNIT = PhraseScores(1.0, 1.0, 1.0, 1.0)


@pytest.fixture
def decoder():
    return DecoderService()


def unigram_lm(sentences):
    return LanguageModelService().train(sentences, order=1)


def random_models(seed):
    """原言語4語・目的言語4語のランダムなフレーズテーブル（50エントリ）"""
    rng = random.Random(seed)
    src_vocab, tgt_vocab = "abcd", "wxyz"
    entries = {}
    while sum(len(options) for options in entries.values()) < 50:
        src = tuple(rng.choice(src_vocab) for _ in range(rng.randint(1, 2)))
        tgt = tuple(rng.choice(tgt_vocab) for _ in range(rng.randint(1, 2)))
        scores = PhraseScores(*(rng.uniform(0.05, 1.0) for _ in range(4)))
        entries.setdefault(src, {})[tgt] = scores
    table = PhraseTable(entries={src: sorted(options.items()) for src, options in entries.items()})

    lm_service = LanguageModelService()
    lm_sentences = [[rng.choice(tgt_vocab) for _ in range(rng.randint(1, 6))] for _ in range(40)]
    lm = lm_service.to_arpa(lm_service.train(lm_sentences, order=2))
    config = DecoderConfig(stack_size=10 ** 6, distortion_limit=None)
    return TranslationModels(phrase_table=table, lm=lm, config=config), src_vocab


def exhaustive_best(src, models, weights):
    """全分割 × 全順列 × 全訳候補を調べた最大スコア"""
    n = len(src)
    oov = models.config.oov_log_score

    def options(start, end):
        found = [(tgt, scores.logs()) for tgt, scores in models.phrase_table.lookup(tuple(src[start:end + 1]))]
        if not found and start == end:
            found = [((src[start],), (oov,) * 4)]
        return found

    best = -math.inf
    for cuts in itertools.product((False, True), repeat=n - 1):
        segments, start = [], 0
        for position, cut in enumerate(cuts, start=1):
            if cut:
                segments.append((start, position - 1))
                start = position
        segments.append((start, n - 1))
        span_options = [options(s, e) for s, e in segments]
        if not all(span_options):
            continue
        for order in itertools.permutations(range(len(segments))):
            for choice in itertools.product(*(span_options[k] for k in order)):
                output, phrase, distortion, last_end = [], [0.0] * 4, 0, 0
                for k, (tgt, logs) in zip(order, choice):
                    s, e = segments[k]
                    output.extend(tgt)
                    phrase = [a + b for a, b in zip(phrase, logs)]
                    distortion += abs(s + 1 - last_end - 1)
                    last_end = e + 1
                features = Features(
                    models.lm.logprob_sentence(output), *phrase, -float(distortion), -float(len(output))
                )
                best = max(best, features.weighted(weights))
    return best


class TestReorderingCost:
    @pytest.mark.parametrize("prev_end, next_start, expected", [(3, 4, 0), (3, 6, 2), (5, 2, 4), (0, 1, 0)])
    def test_examples(self, prev_end, next_start, expected):
        assert reordering_cost(prev_end, next_start) == expected

    def test_invalid_positions(self):
        with pytest.raises(ValidationError):
            reordering_cost(-1, 1)
        with pytest.raises(ValidationError):
            reordering_cost(0, 0)


class TestDecode:
    def test_single_known_word(self, decoder):
        models = TranslationModels(
            phrase_table=PhraseTable(entries={("a",): [(("x",), UNIT)]}),
            lm=unigram_lm([["x"]]),
        )
        weights = FeatureWeights()
        result = decoder.decode(["a"], models, weights)
        assert result.tokens == ["x"]
        expected = weights.w_lm * models.lm.logprob_sentence(["x"]) + weights.w_word_penalty * -1
        assert result.derivation.score == pytest.approx(expected, abs=1e-9)
        assert decoder.score_derivation(result.derivation, models, weights) == pytest.approx(expected, abs=1e-9)

    def test_oov_copied(self, decoder):
        models = TranslationModels(phrase_table=PhraseTable(), lm=unigram_lm([["x"]]))
        result = decoder.decode(["qqq"], models, FeatureWeights())
        assert result.tokens == ["qqq"]
        assert result.derivation.steps[0].oov

    def test_empty_source(self, decoder):
        models = TranslationModels(phrase_table=PhraseTable(), lm=unigram_lm([["x"]]))
        result = decoder.decode([], models, FeatureWeights())
        assert result.tokens == []
        assert result.derivation.steps == []

    @pytest.mark.parametrize("seed", range(30))
    def test_matches_exhaustive_search(self, decoder, seed):
        models, src_vocab = random_models(seed)
        rng = random.Random(1000 + seed)
        src = [rng.choice(src_vocab + "q") for _ in range(rng.randint(1, 4))]
        weights = FeatureWeights()
        result = decoder.decode(src, models, weights)
        assert result.derivation.score == pytest.approx(exhaustive_best(src, models, weights), abs=1e-9)

    def test_complete_coverage(self, decoder, synthetic_models, synthetic_dev):
        for src, _ in synthetic_dev:
            steps = decoder.decode(src, synthetic_models, FeatureWeights()).derivation.steps
            positions = sorted(p for step in steps for p in range(step.src_span[0], step.src_span[1] + 1))
            assert positions == list(range(len(src)))

    def test_incremental_score_matches_recomputation(self, decoder, synthetic_models, synthetic_dev):
        weights = FeatureWeights()
        for src, _ in synthetic_dev:
            derivation = decoder.decode(src, synthetic_models, weights).derivation
            recomputed = decoder.score_derivation(derivation, synthetic_models, weights)
            assert derivation.score == pytest.approx(recomputed, abs=1e-9)

    @pytest.mark.parametrize("factor", [2.0, 0.5])
    def test_weight_scaling_keeps_output(self, decoder, synthetic_models, synthetic_dev, factor):
        weights = FeatureWeights()
        for src, _ in synthetic_dev:
            plain = decoder.decode(src, synthetic_models, weights)
            scaled = decoder.decode(src, synthetic_models, weights.scaled(factor))
            assert scaled.tokens == plain.tokens
            assert scaled.derivation.score == pytest.approx(factor * plain.derivation.score)

    def test_reordering_zero_iff_monotone(self, decoder, synthetic_models, synthetic_dev):
        configs = [synthetic_models.config, DecoderConfig(distortion_limit=0)]
        for config in configs:
            for src, _ in synthetic_dev:
                derivation = decoder.decode(src, synthetic_models, FeatureWeights(), config).derivation
                starts = [step.src_span[0] for step in derivation.steps]
                monotone = all(
                    later.src_span[0] == earlier.src_span[1] + 1
                    for earlier, later in zip(derivation.steps, derivation.steps[1:])
                ) and starts[0] == 0
                assert (derivation.reordering_distance() == 0) == monotone
                if config.distortion_limit == 0:
                    assert monotone

    def test_deterministic(self, decoder, synthetic_models, synthetic_dev):
        src = synthetic_dev[0][0]
        first = decoder.decode(src, synthetic_models, FeatureWeights())
        again = decoder.decode(src, synthetic_models, FeatureWeights())
        assert first.tokens == again.tokens
        assert first.derivation.steps == again.derivation.steps

    def test_fallback_without_distortion_limit(self, decoder):
        table = PhraseTable(entries={
            ("a",): [(("y",), PhraseScores(1e-6, 1e-6, 1e-6, 1e-6))],
            ("b",): [(("x",), UNIT)],
            ("c",): [(("z",), PhraseScores(1e-6, 1e-6, 1e-6, 1e-6))],
        })
        models = TranslationModels(phrase_table=table, lm=unigram_lm([["x", "y", "z"]]))
        config = DecoderConfig(stack_size=1, distortion_limit=1)
        result = decoder.decode(["a", "b", "c"], models, FeatureWeights(), config)
        assert result.fallback
        assert sorted(result.tokens) == ["x", "y", "z"]


class TestScoreDerivation:
    @pytest.fixture
    def models(self):
        table = PhraseTable(entries={
            ("a",): [(("x",), UNIT)],
            ("b",): [(("y",), UNIT)],
            ("c",): [(("z",), UNIT)],
        })
        return TranslationModels(phrase_table=table, lm=unigram_lm([["x", "y", "z"]]))

    def _derivation(self, spans):
        targets = {0: ("x",), 1: ("y",), 2: ("z",)}
        return Derivation(
            src_tokens=("a", "b", "c"),
            steps=[DerivationStep(src_span=span, tgt=targets[span[0]], features=Features()) for span in spans],
        )

    def test_monotone_has_no_reordering(self, decoder, models):
        weights = FeatureWeights()
        monotone = decoder.score_derivation(self._derivation([(0, 0), (1, 1), (2, 2)]), models, weights)
        no_reorder = weights.with_value("w_reorder", 0.0)
        assert monotone == pytest.approx(
            decoder.score_derivation(self._derivation([(0, 0), (1, 1), (2, 2)]), models, no_reorder)
        )

    def test_swap_costs_reordering(self, decoder, models):
        weights = FeatureWeights()
        lm_only = models.lm.logprob_sentence(["x", "z", "y"])
        score = decoder.score_derivation(self._derivation([(0, 0), (2, 2), (1, 1)]), models, weights)
        # 0 → [2]: d=1, [2] → [1]: d=2
        expected = weights.w_lm * lm_only + weights.w_reorder * -3.0 + weights.w_word_penalty * -3.0
        assert score == pytest.approx(expected)

    def test_overlapping_spans(self, decoder, models):
        with pytest.raises(ValidationError, match="twice"):
            decoder.score_derivation(self._derivation([(0, 0), (0, 0), (1, 1), (2, 2)]), models, FeatureWeights())

    def test_missing_positions(self, decoder, models):
        with pytest.raises(ValidationError, match="not covered"):
            decoder.score_derivation(self._derivation([(0, 0), (2, 2)]), models, FeatureWeights())

    def test_trace_format(self):
        step = DerivationStep(src_span=(0, 1), tgt=("x", "y"), features=Features(lm=-1.0))
        assert step.format().startswith('[0..1] -> "x y" | -1.000000 ')


class TestDecoderConfig:
    def test_stack_size(self):
        with pytest.raises(ValidationError):
            DecoderConfig(stack_size=0)

    def test_future_cost_unsupported(self):
        with pytest.raises(ValidationError):
            DecoderConfig(future_cost=True)
