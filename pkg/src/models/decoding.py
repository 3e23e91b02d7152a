"""
デコーダ データモデル（素性重み・仮説・導出）
"""

import math
from dataclasses import dataclass, field, fields, replace
from typing import Dict, List, Optional, Tuple

from ..exceptions import ValidationError
from .lm import LanguageModel
from .phrase import Phrase, PhraseTable

WEIGHT_NAMES = (
    "w_lm",
    "w_phi_ts",
    "w_phi_st",
    "w_lex_ts",
    "w_lex_st",
    "w_reorder",
    "w_word_penalty",
)


@dataclass(frozen=True)
class FeatureWeights:
    """対数線形モデルの素性重み"""
    w_lm: float = 0.5
    w_phi_ts: float = 0.2
    w_phi_st: float = 0.2
    w_lex_ts: float = 0.2
    w_lex_st: float = 0.2
    w_reorder: float = 0.3
    w_word_penalty: float = -1.0

    def __post_init__(self):
        for name in WEIGHT_NAMES:
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"weight {name} must be finite")

    def as_tuple(self) -> Tuple[float, ...]:
        return tuple(getattr(self, name) for name in WEIGHT_NAMES)

    def as_dict(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in WEIGHT_NAMES}

    def with_value(self, name: str, value: float) -> "FeatureWeights":
        return replace(self, **{name: value})

    def scaled(self, factor: float) -> "FeatureWeights":
        return FeatureWeights(*(value * factor for value in self.as_tuple()))

    @classmethod
    def from_dict(cls, values: Dict[str, float]) -> "FeatureWeights":
        unknown = set(values) - set(WEIGHT_NAMES)
        if unknown:
            raise ValidationError(f"unknown weight names: {sorted(unknown)}")
        return cls(**{name: float(value) for name, value in values.items()})


@dataclass(frozen=True)
class DecoderConfig:
    """デコーダ設定"""
    stack_size: int = 100
    distortion_limit: Optional[int] = 6      # None は無制限
    max_phrase_len: int = 7
    oov_log_score: float = -10.0
    future_cost: bool = False                # 将来コスト推定（未実装、常にFalse）

    def __post_init__(self):
        if self.stack_size < 1:
            raise ValidationError("stack_size must be >= 1")
        if self.distortion_limit is not None and self.distortion_limit < 0:
            raise ValidationError("distortion_limit must be >= 0 or unlimited")
        if self.max_phrase_len < 1:
            raise ValidationError("max_phrase_len must be >= 1")
        if self.future_cost:
            raise ValidationError("future cost estimation is not supported")

    def unlimited(self) -> "DecoderConfig":
        return replace(self, distortion_limit=None)


@dataclass(frozen=True)
class Features:
    """重み付け前の素性値（対数領域）"""
    lm: float = 0.0
    phi_ts: float = 0.0
    phi_st: float = 0.0
    lex_ts: float = 0.0
    lex_st: float = 0.0
    reorder: float = 0.0          # -d
    word_penalty: float = 0.0     # -出力語数

    def as_tuple(self) -> Tuple[float, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    def __add__(self, other: "Features") -> "Features":
        return Features(*(a + b for a, b in zip(self.as_tuple(), other.as_tuple())))

    def weighted(self, weights: FeatureWeights) -> float:
        return sum(w * f for w, f in zip(weights.as_tuple(), self.as_tuple()))


@dataclass(frozen=True)
class DerivationStep:
    """導出の1ステップ（原言語スパンは0始まり両端含む）"""
    src_span: Tuple[int, int]
    tgt: Phrase
    features: Features
    oov: bool = False

    def format(self, weights: Optional[FeatureWeights] = None) -> str:
        values = " ".join(f"{value:.6f}" for value in self.features.as_tuple())
        line = f'[{self.src_span[0]}..{self.src_span[1]}] -> "{" ".join(self.tgt)}" | {values}'
        if weights is not None:
            line += f" | {self.features.weighted(weights):.6f}"
        return line


@dataclass
class Derivation:
    """最良仮説の導出（フレーズ分割とスパン）"""
    src_tokens: Tuple[str, ...]
    steps: List[DerivationStep] = field(default_factory=list)
    end_lm: float = 0.0           # 文末記号の言語モデル対数確率
    score: float = 0.0            # デコーダが逐次計算したスコア

    @property
    def output(self) -> Tuple[str, ...]:
        return tuple(token for step in self.steps for token in step.tgt)

    def total_features(self) -> Features:
        total = Features(lm=self.end_lm)
        for step in self.steps:
            total = total + step.features
        return total

    def reordering_distance(self) -> int:
        return int(round(-sum(step.features.reorder for step in self.steps)))

    def format_trace(self, weights: Optional[FeatureWeights] = None) -> str:
        return "\n".join(step.format(weights) for step in self.steps)


@dataclass
class Hypothesis:
    """探索中の部分仮説"""
    coverage: int                              # 翻訳済み原言語位置のビットベクトル
    last_end: int                              # 直前フレーズの末尾位置（1始まり、初期値0）
    output: Tuple[str, ...]                    # 生成済み目的言語トークン
    score: float                               # 累積対数線形スコア
    lm_state: Tuple[str, ...]                  # 言語モデル文脈（直近 order-1 語）
    back: Optional["Hypothesis"] = None        # 前の仮説
    step: Optional[DerivationStep] = None      # 前の仮説からの拡張

    @property
    def covered(self) -> int:
        return bin(self.coverage).count("1")

    def recombination_key(self) -> Tuple[int, int, Tuple[str, ...]]:
        return (self.coverage, self.last_end, self.lm_state)

    def sort_key(self) -> Tuple[float, Tuple[str, ...], int, int]:
        """スコア降順 → 出力の辞書順"""
        return (-self.score, self.output, self.coverage, self.last_end)

    def steps(self) -> List[DerivationStep]:
        steps = []
        node = self
        while node is not None and node.step is not None:
            steps.append(node.step)
            node = node.back
        return list(reversed(steps))


@dataclass
class TranslationModels:
    """デコードに必要なモデル一式"""
    phrase_table: PhraseTable
    lm: LanguageModel
    config: DecoderConfig = field(default_factory=DecoderConfig)


@dataclass
class TranslationResult:
    """1文の翻訳結果"""
    tokens: List[str]
    derivation: Derivation
    fallback: bool = False        # 歪み制限なしで再デコードしたか
