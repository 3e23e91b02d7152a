"""
重みチューニング データモデル
"""

from dataclasses import dataclass, field
from typing import List, Tuple

from .decoding import FeatureWeights, WEIGHT_NAMES

METRIC_CHOICES = ("bleu", "ribes", "meteor")

# 現在値に掛ける倍率グリッド
GRID_MULTIPLIERS = (0.25, 0.5, 1.0, 2.0, 4.0)


@dataclass(frozen=True)
class TuneEvaluation:
    """グリッド上の1評価"""
    sweep: int
    weight_name: str
    candidate: int
    value: float
    score: float

    def format(self) -> str:
        return f"{self.sweep} {self.weight_name} {self.candidate} {self.value:.6f} {self.score:.6f}"


@dataclass
class TuneReport:
    """チューニング結果"""
    metric: str
    initial: FeatureWeights
    initial_score: float
    evaluations: List[TuneEvaluation] = field(default_factory=list)
    iterations: List[Tuple[FeatureWeights, float]] = field(default_factory=list)  # 採用された重みとスコア
    accepted: FeatureWeights = field(default_factory=FeatureWeights)

    @property
    def accepted_score(self) -> float:
        return self.iterations[-1][1] if self.iterations else self.initial_score

    def accepted_scores(self) -> List[float]:
        return [score for _, score in self.iterations]

    def to_text(self) -> str:
        lines = [f"0 initial 0 0.000000 {self.initial_score:.6f}"]
        lines.extend(evaluation.format() for evaluation in self.evaluations)
        lines.append("accepted " + " ".join(f"{value:.6f}" for value in self.accepted.as_tuple()))
        return "\n".join(lines) + "\n"


def format_weights(weights: FeatureWeights) -> str:
    """重みファイル形式（name<TAB>value、固定順）"""
    return "".join(f"{name}\t{getattr(weights, name)!r}\n" for name in WEIGHT_NAMES)
