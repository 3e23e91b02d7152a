"""
対訳コーパス データモデル
"""

import unicodedata
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from ..exceptions import ValidationError


LTR = "left-to-right"
RTL = "right-to-left"


@dataclass(frozen=True)
class LanguageProfile:
    """言語ごとの文字体系プロファイル"""
    code: str                                  # 2文字の言語タグ
    script_blocks: Tuple[Tuple[int, int], ...]  # 許可するUnicodeブロック範囲（両端含む）
    digit_zero: int                            # 数字0のコードポイント
    direction: str = LTR                       # 記述方向
    latin_side: bool = False                   # 英語側のみTrue
    name: str = ""                             # 言語名
    script: str = ""                           # 文字体系名
    word_order: str = "SOV"                    # 語順
    family: str = ""                           # 語族
    flores_code: str = ""                      # Flores-200のファイルタグ

    def __post_init__(self):
        if len(self.code) != 2:
            raise ValidationError(f"language code must have 2 letters: {self.code!r}")
        if not self.script_blocks:
            raise ValidationError(f"profile {self.code}: script_blocks is empty")
        previous_end = -1
        for start, end in self.script_blocks:
            if start > end or start <= previous_end:
                raise ValidationError(
                    f"profile {self.code}: script blocks must be sorted and non-overlapping"
                )
            previous_end = end
        for offset in range(10):
            if unicodedata.decimal(chr(self.digit_zero + offset), None) != offset:
                raise ValidationError(
                    f"profile {self.code}: U+{self.digit_zero:04X} does not start a digit run"
                )
        if self.direction not in (LTR, RTL):
            raise ValidationError(f"profile {self.code}: unknown direction {self.direction!r}")

    def in_script(self, char: str) -> bool:
        """文字がプロファイルの文字ブロックに含まれるか"""
        point = ord(char)
        return any(start <= point <= end for start, end in self.script_blocks)

    @property
    def digits(self) -> str:
        """この文字体系の数字10文字"""
        return "".join(chr(self.digit_zero + offset) for offset in range(10))


@dataclass(frozen=True)
class SentencePair:
    """対訳文ペア"""
    source: str               # 原言語側の1行
    target: str               # 目的言語側の1行
    line_no: int              # 元ファイルでの行番号（1始まり）

    def __post_init__(self):
        for side in (self.source, self.target):
            if "\n" in side or "\r" in side:
                raise ValidationError(f"line {self.line_no}: sentence contains a line terminator")

    @property
    def source_tokens(self) -> List[str]:
        return self.source.split()

    @property
    def target_tokens(self) -> List[str]:
        return self.target.split()


@dataclass
class ParallelCorpus:
    """対訳コーパス"""
    pairs: List[SentencePair]
    src_profile: LanguageProfile
    tgt_profile: LanguageProfile

    def __post_init__(self):
        previous = 0
        for pair in self.pairs:
            if pair.line_no <= previous:
                raise ValidationError("pair line numbers must be unique and increasing")
            previous = pair.line_no

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def token_pairs(self) -> List[Tuple[List[str], List[str]]]:
        """空白区切りのトークン列ペアを取得"""
        return [(pair.source_tokens, pair.target_tokens) for pair in self.pairs]

    def side(self, side: str) -> List[str]:
        """片側の文リストを取得（source / target）"""
        if side == "source":
            return [pair.source for pair in self.pairs]
        if side == "target":
            return [pair.target for pair in self.pairs]
        raise ValidationError(f"unknown corpus side: {side!r}")

    def with_pairs(self, pairs: List[SentencePair]) -> "ParallelCorpus":
        """同じプロファイルで別のペア列を持つコーパスを作成"""
        return ParallelCorpus(pairs=pairs, src_profile=self.src_profile, tgt_profile=self.tgt_profile)


@dataclass
class CorpusStats:
    """コーパス統計（トークン長ヒストグラム）"""
    pair_count: int
    source_histogram: Dict[int, int] = field(default_factory=dict)  # トークン数 → 文数
    target_histogram: Dict[int, int] = field(default_factory=dict)
