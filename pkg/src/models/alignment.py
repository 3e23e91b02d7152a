"""
単語アライメント データモデル
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from ..exceptions import ValidationError

NULL = "<null>"
NULL_POSITION = -1

INTERSECTION = "intersection"
UNION = "union"
GROW_DIAG = "grow-diag"
GROW_DIAG_FINAL = "grow-diag-final"
GROW_DIAG_FINAL_AND = "grow-diag-final-and"
HEURISTICS = (INTERSECTION, UNION, GROW_DIAG, GROW_DIAG_FINAL, GROW_DIAG_FINAL_AND)


@dataclass
class LexicalTable:
    """語彙翻訳確率 t(target | source)"""
    t: Dict[Tuple[str, str], float] = field(default_factory=dict)  # (原言語語, 目的言語語) → 確率

    def prob(self, source: str, target: str) -> float:
        return self.t.get((source, target), 0.0)

    def __len__(self) -> int:
        return len(self.t)


@dataclass
class Ibm2Distortion:
    """位置歪み確率 a(i | j, l, m)、NULLは i = -1"""
    a: Dict[Tuple[int, int, int, int], float] = field(default_factory=dict)  # (i, j, l, m) → 確率

    def prob(self, i: int, j: int, l: int, m: int) -> float:
        # 学習済みの行は全位置を持つので、欠けていれば未学習の文長組み合わせ（一様分布）
        return self.a.get((i, j, l, m), 1.0 / (l + 1))


@dataclass(frozen=True)
class AlignmentMatrix:
    """1文ペアのアライメント（0始まりの (原言語位置, 目的言語位置) の集合）"""
    links: FrozenSet[Tuple[int, int]]
    src_len: int
    tgt_len: int

    def __post_init__(self):
        object.__setattr__(self, "links", frozenset(self.links))
        for i, j in self.links:
            if not (0 <= i < self.src_len and 0 <= j < self.tgt_len):
                raise ValidationError(
                    f"link {i}-{j} outside a {self.src_len}x{self.tgt_len} alignment"
                )

    @classmethod
    def of(cls, links: Iterable[Tuple[int, int]], src_len: int, tgt_len: int) -> "AlignmentMatrix":
        return cls(links=frozenset(links), src_len=src_len, tgt_len=tgt_len)

    def transpose(self) -> "AlignmentMatrix":
        return AlignmentMatrix.of(((j, i) for i, j in self.links), self.tgt_len, self.src_len)

    def sorted_links(self) -> List[Tuple[int, int]]:
        return sorted(self.links)


@dataclass
class AlignmentModel:
    """一方向のアライメントモデル（IBM1のみなら distortion は None）"""
    lexical: LexicalTable
    distortion: Optional[Ibm2Distortion] = None
    ibm1_log_likelihoods: List[float] = field(default_factory=list)
    ibm2_log_likelihoods: List[float] = field(default_factory=list)
