"""
言語モデル サービス
"""

import math
from collections import defaultdict
from typing import Dict, Sequence

from loguru import logger

from ..exceptions import DataError, ValidationError
from ..models.lm import (
    ARPA_IMPOSSIBLE,
    SMOOTHING_CHOICES,
    SMOOTHING_NONE,
    UNK,
    WITTEN_BELL,
    ArpaLanguageModel,
    Context,
    LanguageModel,
    NGramModel,
    pad_sentence,
)


def _round6(value: float) -> float:
    return float(f"{value:.6f}")


def _log10(value: float) -> float:
    return math.log10(value) if value > 0.0 else ARPA_IMPOSSIBLE


class LanguageModelService:
    """言語モデルサービス"""

    def train(
        self, sentences: Sequence[Sequence[str]], order: int = 3, smoothing: str = WITTEN_BELL
    ) -> NGramModel:
        """1..order の n-gram を数える"""
        if order < 1:
            raise ValidationError(f"LM order must be >= 1, got {order}")
        if smoothing not in SMOOTHING_CHOICES:
            raise ValidationError(f"unknown smoothing {smoothing!r}")
        if not sentences:
            raise DataError("cannot train a language model on an empty sentence list")

        counts: Dict[Context, Dict[str, int]] = defaultdict(lambda: defaultdict(int))
        vocab = set()
        for tokens in sentences:
            padded = pad_sentence(tokens, order)
            for k in range(order - 1, len(padded)):
                word = padded[k]
                vocab.add(word)
                for n in range(1, order + 1):
                    counts[padded[k - n + 1:k]][word] += 1

        model = NGramModel(
            order=order,
            counts={ctx: dict(nexts) for ctx, nexts in counts.items()},
            vocab=frozenset(vocab),
            smoothing=smoothing,
        )
        logger.info(
            f"Trained {order}-gram LM ({smoothing}) on {len(sentences)} sentences: "
            f"vocabulary {len(model.vocab)}, contexts {len(model.counts)}"
        )
        return model

    @staticmethod
    def prob(model: LanguageModel, word: str, context: Sequence[str]) -> float:
        return model.prob(word, context)

    @staticmethod
    def logprob_sentence(model: LanguageModel, tokens: Sequence[str]) -> float:
        return model.logprob_sentence(tokens)

    @staticmethod
    def perplexity(model: LanguageModel, sentences: Sequence[Sequence[str]]) -> float:
        """exp(-Σ対数確率 / Σ(文長+1))"""
        if not sentences:
            raise DataError("cannot compute perplexity of an empty sentence list")
        total = math.fsum(model.logprob_sentence(tokens) for tokens in sentences)
        events = sum(len(tokens) + 1 for tokens in sentences)
        return math.exp(-total / events)

    @staticmethod
    def to_arpa(model: NGramModel) -> ArpaLanguageModel:
        """ARPA形式のバックオフ表現へ変換（log10、小数6桁に丸める）"""
        with_backoff = model.smoothing != SMOOTHING_NONE
        arpa_entries = {}
        for context, nexts in model.counts.items():
            for word in nexts:
                arpa_entries[context + (word,)] = (_round6(_log10(model.prob(word, context))), None)

        for context in model.counts:
            if not context:
                continue
            if context not in arpa_entries:
                # 事象として出現しない文脈（文頭記号など）
                arpa_entries[context] = (ARPA_IMPOSSIBLE, None)
            if with_backoff:
                bow = _round6(math.log10(model.backoff_weight(context)))
                arpa_entries[context] = (arpa_entries[context][0], bow)

        arpa_entries[(UNK,)] = (_round6(_log10(model.prob(UNK, ()))), None)
        logger.info(f"Converted LM to ARPA form with {len(arpa_entries)} entries")
        return ArpaLanguageModel(order=model.order, entries=arpa_entries)
