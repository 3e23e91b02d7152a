"""
n-gram言語モデル データモデル
"""

import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Protocol, Sequence, Tuple

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

SMOOTHING_NONE = "none"
WITTEN_BELL = "witten-bell"
SMOOTHING_CHOICES = (SMOOTHING_NONE, WITTEN_BELL)

# ARPAで「事象として出現しない文脈」に付ける確率
ARPA_IMPOSSIBLE = -99.0

Context = Tuple[str, ...]


class LanguageModel(Protocol):
    """デコーダ・評価から見た言語モデルのインターフェース"""

    order: int

    def prob(self, word: str, context: Sequence[str]) -> float: ...

    def logprob_sentence(self, tokens: Sequence[str]) -> float: ...


def pad_sentence(tokens: Sequence[str], order: int) -> Tuple[str, ...]:
    """文頭記号(order-1個)と文末記号で囲む"""
    return (BOS,) * (order - 1) + tuple(tokens) + (EOS,)


def _sentence_logprob(model: "LanguageModel", tokens: Sequence[str]) -> float:
    padded = pad_sentence(tokens, model.order)
    total = 0.0
    for k in range(model.order - 1, len(padded)):
        p = model.prob(padded[k], padded[max(0, k - model.order + 1):k])
        if p <= 0.0:
            return -math.inf
        total += math.log(p)
    return total


@dataclass
class NGramModel:
    """カウントベースのn-gramモデル（Witten-Bell補間 / 最尤推定）"""
    order: int
    counts: Dict[Context, Dict[str, int]] = field(default_factory=dict)  # 文脈 → 次単語 → 回数
    vocab: FrozenSet[str] = frozenset()                                   # 観測語 + 文末記号
    smoothing: str = WITTEN_BELL

    def __post_init__(self):
        self._totals = {ctx: sum(nexts.values()) for ctx, nexts in self.counts.items()}

    def context_total(self, context: Context) -> int:
        return self._totals.get(context, 0)

    def context_types(self, context: Context) -> int:
        return len(self.counts.get(context, {}))

    def uniform(self) -> float:
        """語彙 + UNK 上の一様分布"""
        return 1.0 / (len(self.vocab) + 1)

    def prob(self, word: str, context: Sequence[str]) -> float:
        context = tuple(context)[-(self.order - 1):] if self.order > 1 else ()
        if self.smoothing == SMOOTHING_NONE:
            total = self._totals.get(context, 0)
            if total == 0:
                return 0.0
            return self.counts[context].get(word, 0) / total
        return self._witten_bell(word, context)

    def _witten_bell(self, word: str, context: Context) -> float:
        lower = self._witten_bell(word, context[1:]) if context else self.uniform()
        total = self._totals.get(context, 0)
        if total == 0:
            return lower
        types = len(self.counts[context])
        return (self.counts[context].get(word, 0) + types * lower) / (total + types)

    def backoff_weight(self, context: Context) -> float:
        """低次モデルへ回す確率質量 T(h) / (c(h) + T(h))"""
        total = self._totals.get(context, 0)
        if total == 0:
            return 1.0
        types = len(self.counts[context])
        return types / (total + types)

    def logprob_sentence(self, tokens: Sequence[str]) -> float:
        return _sentence_logprob(self, tokens)


@dataclass
class ArpaLanguageModel:
    """ARPA形式から読み戻したバックオフ言語モデル

    entries: n-gram → (log10確率, バックオフ重み(log10) または None)
    """
    order: int
    entries: Dict[Context, Tuple[float, Optional[float]]] = field(default_factory=dict)

    def ngram_counts(self) -> Dict[int, int]:
        counts = {n: 0 for n in range(1, self.order + 1)}
        for ngram in self.entries:
            counts[len(ngram)] += 1
        return counts

    @property
    def vocab(self) -> FrozenSet[str]:
        return frozenset(ngram[0] for ngram in self.entries if len(ngram) == 1)

    def _map(self, word: str) -> str:
        return word if (word,) in self.entries else UNK

    def log10_prob(self, word: str, context: Sequence[str]) -> float:
        context = tuple(context)[-(self.order - 1):] if self.order > 1 else ()
        words = tuple(self._map(w) for w in context) + (self._map(word),)
        backoff = 0.0
        while len(words) > 1:
            if words in self.entries:
                return backoff + self.entries[words][0]
            bow = self.entries.get(words[:-1], (0.0, None))[1]
            backoff += bow if bow is not None else 0.0
            words = words[1:]
        return backoff + self.entries.get(words, (ARPA_IMPOSSIBLE, None))[0]

    def prob(self, word: str, context: Sequence[str]) -> float:
        return 10.0 ** self.log10_prob(word, context)

    def logprob_sentence(self, tokens: Sequence[str]) -> float:
        return _sentence_logprob(self, tokens)
