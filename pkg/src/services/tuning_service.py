"""
重みチューニング サービス（貪欲な座標グリッド探索）
"""

from typing import List, Sequence

from loguru import logger

from ..exceptions import DataError, ValidationError
from ..models.decoding import WEIGHT_NAMES, FeatureWeights, TranslationModels
from ..models.evaluation import RibesConfig
from ..models.tuning import GRID_MULTIPLIERS, METRIC_CHOICES, TuneEvaluation, TuneReport
from ..utils.prob_utils import ProbUtils
from .decoder_service import DecoderService
from .evaluation_service import METEOR, RIBES, EvaluationService

NONNEGATIVE_WEIGHTS = ("w_reorder",)


class TuningService:
    """重みチューニングサービス"""

    def __init__(
        self,
        decoder_service: DecoderService = None,
        evaluation_service: EvaluationService = None,
        ribes_config: RibesConfig = None,
    ):
        self.decoder_service = decoder_service or DecoderService()
        self.evaluation_service = evaluation_service or EvaluationService()
        self.ribes_config = ribes_config or RibesConfig()

    @staticmethod
    def candidates(name: str, value: float) -> List[float]:
        """倍率グリッド（並べ替え重み以外は符号反転も含む）"""
        base = value if value != 0.0 else 1.0
        values = [base * multiplier for multiplier in GRID_MULTIPLIERS]
        if name in NONNEGATIVE_WEIGHTS:
            return [abs(v) for v in values]
        return values + [-v for v in values]

    def dev_score(
        self,
        sources: Sequence[Sequence[str]],
        references: Sequence[Sequence[str]],
        models: TranslationModels,
        weights: FeatureWeights,
        metric: str,
    ) -> float:
        """開発セットを翻訳して指標を計算"""
        hyps = [result.tokens for result in self.decoder_service.translate_corpus(sources, models, weights)]
        if metric == "bleu":
            return ProbUtils.mean(
                self.evaluation_service.sentence_bleu(h, r) for h, r in zip(hyps, references)
            )
        if metric == RIBES:
            return self.evaluation_service.metric_corpus(RIBES, hyps, references, self.ribes_config)
        return self.evaluation_service.metric_corpus(METEOR, hyps, references)

    def tune_weights(
        self,
        sources: Sequence[Sequence[str]],
        references: Sequence[Sequence[str]],
        models: TranslationModels,
        initial: FeatureWeights,
        metric: str = "bleu",
        passes: int = 3,
    ) -> TuneReport:
        """各重みを固定順に倍率グリッドで探索し、厳密に改善する値を採用"""
        if passes < 1:
            raise ValidationError(f"tuning passes must be >= 1, got {passes}")
        if metric not in METRIC_CHOICES:
            raise ValidationError(f"unknown tuning metric {metric!r}")
        if len(sources) != len(references):
            raise DataError(f"dev set line count mismatch {len(sources)} vs {len(references)}")
        if not sources:
            raise DataError("empty dev set")

        current = initial
        current_score = self.dev_score(sources, references, models, current, metric)
        report = TuneReport(
            metric=metric,
            initial=initial,
            initial_score=current_score,
            iterations=[(initial, current_score)],
            accepted=initial,
        )
        logger.info(f"Tuning on {len(sources)} dev sentences, initial {metric} {current_score:.6f}")

        for sweep in range(1, passes + 1):
            for name in WEIGHT_NAMES:
                best_value, best_score = None, current_score
                for index, value in enumerate(self.candidates(name, getattr(current, name))):
                    score = self.dev_score(sources, references, models, current.with_value(name, value), metric)
                    report.evaluations.append(TuneEvaluation(sweep, name, index, value, score))
                    logger.debug(f"sweep {sweep} {name}={value:.6f}: {metric} {score:.6f}")
                    if score > best_score:
                        best_value, best_score = value, score
                if best_value is not None:
                    current = current.with_value(name, best_value)
                    current_score = best_score
                    report.iterations.append((current, current_score))
                    logger.info(f"sweep {sweep}: accepted {name}={best_value:.6f} ({metric} {best_score:.6f})")

        report.accepted = current
        logger.info(f"Tuning finished: {metric} {report.initial_score:.6f} -> {current_score:.6f}")
        return report
