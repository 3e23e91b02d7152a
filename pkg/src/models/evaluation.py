"""
評価指標 データモデル
"""

from dataclasses import dataclass, field
from typing import List

from ..exceptions import ValidationError


@dataclass
class BleuReport:
    """BLEUの計算結果"""
    score: float
    precisions: List[float] = field(default_factory=list)  # p1..pN
    brevity_penalty: float = 1.0
    hyp_len: int = 0
    ref_len: int = 0


@dataclass(frozen=True)
class RibesConfig:
    """RIBESパラメータ"""
    alpha: float = 0.25
    beta: float = 0.10

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"RIBES {name} must be within [0, 1], got {value}")


@dataclass
class RibesReport:
    """RIBESの計算結果"""
    tau: float
    nkt: float
    p1: float
    bp: float
    score: float
    matches: int = 0


@dataclass
class MeteorReport:
    """METEORの計算結果"""
    matches: int
    chunks: int
    precision: float
    recall: float
    fmean: float
    penalty: float
    score: float


@dataclass
class SentenceScores:
    """1文ごとの評価値"""
    index: int
    bleu: float
    ribes: float
    meteor: float


@dataclass
class EvaluationResult:
    """コーパス評価（1方向1行）"""
    pair: str
    direction: str
    bleu: BleuReport
    ribes: float
    meteor: float
    ribes_config: RibesConfig = field(default_factory=RibesConfig)
    sentences: List[SentenceScores] = field(default_factory=list)
