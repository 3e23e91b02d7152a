"""
フレーズテーブル データモデル
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Tuple

from ..exceptions import ValidationError

Phrase = Tuple[str, ...]

# 語彙重みが0になる場合の下限（スコアを (0,1] に保つ）
LEX_FLOOR = 1e-9


@dataclass(frozen=True)
class PhrasePair:
    """フレーズ対"""
    src: Phrase
    tgt: Phrase

    def __post_init__(self):
        if not self.src or not self.tgt:
            raise ValidationError("phrase pair sides must be non-empty")


@dataclass(frozen=True)
class ExtractedPhrase:
    """抽出されたフレーズ対と文中のスパン（両端含む、0始まり）"""
    pair: PhrasePair
    src_span: Tuple[int, int]
    tgt_span: Tuple[int, int]


@dataclass(frozen=True)
class PhraseScores:
    """4つの翻訳素性"""
    phi_t_given_s: float
    phi_s_given_t: float
    lex_t_given_s: float
    lex_s_given_t: float

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.phi_t_given_s, self.phi_s_given_t, self.lex_t_given_s, self.lex_s_given_t)

    def logs(self) -> Tuple[float, float, float, float]:
        return tuple(math.log(value) for value in self.as_tuple())


@dataclass
class PhraseTable:
    """フレーズテーブル（原言語フレーズ → 訳候補リスト）"""
    entries: Dict[Phrase, List[Tuple[Phrase, PhraseScores]]] = field(default_factory=dict)

    def lookup(self, src: Phrase) -> List[Tuple[Phrase, PhraseScores]]:
        return self.entries.get(tuple(src), [])

    def __len__(self) -> int:
        return sum(len(options) for options in self.entries.values())

    def iter_sorted(self) -> Iterator[Tuple[Phrase, Phrase, PhraseScores]]:
        """辞書順（原言語 → 目的言語）で全エントリを列挙"""
        for src in sorted(self.entries):
            for tgt, scores in sorted(self.entries[src], key=lambda option: option[0]):
                yield src, tgt, scores
