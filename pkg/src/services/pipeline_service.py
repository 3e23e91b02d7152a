"""
パイプライン サービス（学習・チューニング・翻訳・評価の各コマンド）
"""

from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import pandas as pd
from loguru import logger

from ..config.pipeline_config import PipelineConfig
from ..exceptions import DataError, SmtError, ValidationError
from ..models.corpus import ParallelCorpus
from ..models.decoding import FeatureWeights, TranslationModels
from ..models.evaluation import EvaluationResult
from ..models.preprocess import CleanConfig
from ..models.tuning import TuneReport
from ..storage.artifact_store import (
    IBM2_S2T,
    IBM2_T2S,
    LEX_S2T,
    LEX_T2S,
    PHRASE_TABLE,
    TUNE_REPORT,
    WEIGHTS,
    ModelDirectory,
    utc_timestamp,
)
from ..storage.repositories.corpus_repository import CorpusRepository
from ..storage.repositories.model_repository import ModelRepository
from .alignment_service import AlignmentService
from .corpus_service import OGIVE_THRESHOLDS, CorpusService
from .decoder_service import DecoderService
from .evaluation_service import EvaluationService
from .language_model_service import LanguageModelService
from .phrase_service import PhraseService
from .preprocess_service import PreprocessService, SidePreprocessor
from .tuning_service import TuningService


@contextmanager
def stage(name: str):
    """ステージ名を例外に付与する"""
    logger.info(f"Stage {name} started")
    try:
        yield
    except SmtError as e:
        if not e.stage:
            e.stage = name
        raise
    except Exception as e:
        raise SmtError(f"{type(e).__name__}: {e}", stage=name) from e
    logger.info(f"Stage {name} finished")


@dataclass
class LoadedModels:
    """モデルディレクトリから読み込んだ翻訳モデル一式"""
    models: TranslationModels
    weights: FeatureWeights
    source: SidePreprocessor
    target: SidePreprocessor


class PipelineService:
    """パイプラインサービス"""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.text_repository = CorpusRepository()
        self.model_repository = ModelRepository(self.text_repository)
        self.corpus_service = CorpusService(self.text_repository)
        self.preprocess_service = PreprocessService()
        self.lm_service = LanguageModelService()
        self.alignment_service = AlignmentService()
        self.phrase_service = PhraseService()
        self.decoder_service = DecoderService()
        self.evaluation_service = EvaluationService()

    def check(self, command: str):
        ok, errors = self.config.validate(command)
        if not ok:
            raise ValidationError("; ".join(errors), stage="config")

    @property
    def model_directory(self) -> ModelDirectory:
        return ModelDirectory(Path(self.config.model_dir), self.config.src_lang, self.config.tgt_lang)

    def clean_configs(self) -> Tuple[CleanConfig, CleanConfig]:
        src_profile, tgt_profile = self.config.profiles()
        return CleanConfig.for_profile(src_profile), CleanConfig.for_profile(tgt_profile)

    # ------------------------------------------------------------------
    # 前処理
    # ------------------------------------------------------------------

    def load_corpus(self, paths: Tuple[Path, Path]) -> ParallelCorpus:
        src_profile, tgt_profile = self.config.profiles()
        with stage("load"):
            return self.corpus_service.load_parallel(paths[0], paths[1], src_profile, tgt_profile)

    def prepare_corpus(self, corpus: ParallelCorpus) -> ParallelCorpus:
        """クリーニング → フィルタ → トークン化（トークン化で空になったペアも除外）"""
        src_config, tgt_config = self.clean_configs()
        with stage("clean"):
            corpus = self.preprocess_service.clean_corpus(corpus, src_config, tgt_config)
        with stage("filter"):
            corpus = self.corpus_service.filter_pairs(corpus, self.config.max_len, self.config.max_ratio)
        with stage("tokenize"):
            corpus = self.preprocess_service.tokenize_corpus(corpus)
            corpus = self.corpus_service.filter_pairs(corpus, self.config.max_len, self.config.max_ratio)
        return corpus

    def clean(self, output_prefix: Optional[str] = None) -> Tuple[Path, Path]:
        """クリーニング・フィルタ・トークン化したコーパスを書き出す"""
        self.check("clean")
        corpus = self.prepare_corpus(self.load_corpus(self.config.corpus_paths()))
        prefix = output_prefix or f"{self.config.corpus_prefix}.clean"
        paths = self.config.side_paths(prefix, self.config.src_lang, self.config.tgt_lang)
        with stage("write"):
            self.corpus_service.write_parallel(corpus, *paths)
        return paths

    def stats(self, thresholds=OGIVE_THRESHOLDS) -> Tuple[pd.DataFrame, pd.DataFrame]:
        """トークン長ヒストグラムと累積割合"""
        self.check("stats")
        corpus = self.load_corpus(self.config.corpus_paths())
        with stage("stats"):
            src_config, tgt_config = self.clean_configs()
            corpus = self.preprocess_service.tokenize_corpus(
                self.preprocess_service.clean_corpus(corpus, src_config, tgt_config)
            )
            histogram = self.corpus_service.histogram_frame(self.corpus_service.corpus_stats(corpus))
            ogive = self.corpus_service.ogive_table(corpus, thresholds)
        return histogram, ogive

    # ------------------------------------------------------------------
    # 学習
    # ------------------------------------------------------------------

    def train(self) -> Path:
        """クリーニングからフレーズテーブルまでの学習を実行"""
        self.check("train")
        config = self.config
        model_dir = self.model_directory
        model_dir.init()
        corpus_paths = list(config.corpus_paths())
        started = utc_timestamp()

        corpus = self.prepare_corpus(self.load_corpus(tuple(corpus_paths)))
        if len(corpus) == 0:
            raise DataError("empty corpus after cleaning and filtering", stage="filter")
        model_dir.record_stage(
            "preprocess", config.stage_params("max_len", "max_ratio"), corpus_paths, [], started
        )

        started = utc_timestamp()
        with stage("truecase"):
            src_tc, tgt_tc = self.preprocess_service.train_truecasers(corpus)
            corpus = self.preprocess_service.truecase_corpus(corpus, src_tc, tgt_tc)
            truecase_paths = [model_dir.truecase_path(config.src_lang), model_dir.truecase_path(config.tgt_lang)]
            self.model_repository.save_truecase(truecase_paths[0], src_tc)
            self.model_repository.save_truecase(truecase_paths[1], tgt_tc)
        model_dir.record_stage("truecase", {}, corpus_paths, truecase_paths, started)

        pairs = corpus.token_pairs()

        started = utc_timestamp()
        with stage("lm"):
            lm = self.lm_service.train([tgt for _, tgt in pairs], config.lm_order, config.lm_smoothing)
            self.model_repository.save_arpa(model_dir.lm_path, self.lm_service.to_arpa(lm))
        model_dir.record_stage(
            "lm", config.stage_params("lm_order", "lm_smoothing"), corpus_paths, [model_dir.lm_path], started
        )

        started = utc_timestamp()
        with stage("align"):
            reversed_pairs = [(tgt, src) for src, tgt in pairs]
            forward = self.alignment_service.train_direction(pairs, config.em_iterations, config.em_iterations)
            reverse = self.alignment_service.train_direction(
                reversed_pairs, config.em_iterations, config.em_iterations
            )
            self.model_repository.save_lexical(model_dir.path(LEX_S2T), forward.lexical)
            self.model_repository.save_lexical(model_dir.path(LEX_T2S), reverse.lexical)
            self.model_repository.save_distortion(model_dir.path(IBM2_S2T), forward.distortion)
            self.model_repository.save_distortion(model_dir.path(IBM2_T2S), reverse.distortion)

            alignments = self.alignment_service.align_corpus(pairs, forward, reverse, config.symmetrization)
            alignment_path = model_dir.alignment_path(config.symmetrization)
            self.model_repository.save_alignments(alignment_path, alignments)
        align_outputs = [model_dir.path(n) for n in (LEX_S2T, LEX_T2S, IBM2_S2T, IBM2_T2S)] + [alignment_path]
        model_dir.record_stage(
            "align", config.stage_params("em_iterations", "symmetrization"), corpus_paths, align_outputs, started
        )

        started = utc_timestamp()
        with stage("phrase"):
            table = self.phrase_service.build_phrase_table(
                pairs,
                alignments,
                forward.lexical,
                reverse.lexical,
                config.max_phrase_len,
                config.unaligned_expansion,
            )
            self.model_repository.save_phrase_table(model_dir.path(PHRASE_TABLE), table)
            self.model_repository.save_weights(model_dir.path(WEIGHTS), FeatureWeights())
        model_dir.record_stage(
            "phrase",
            config.stage_params("max_phrase_len", "unaligned_expansion"),
            [alignment_path, model_dir.path(LEX_S2T), model_dir.path(LEX_T2S)],
            [model_dir.path(PHRASE_TABLE), model_dir.path(WEIGHTS)],
            started,
        )

        with stage("verify"):
            model_dir.require(model_dir.training_artifacts(config.symmetrization))
        logger.info(f"Training finished; model directory {model_dir.root}")
        return model_dir.root

    # ------------------------------------------------------------------
    # モデルの読み込み
    # ------------------------------------------------------------------

    def check_phrase_length(self, model_dir: ModelDirectory) -> Optional[int]:
        """学習時の最大フレーズ長がデコーダの設定より長ければ警告"""
        try:
            trained = model_dir.load_manifest().stage("phrase").params.get("max_phrase_len")
        except KeyError:
            return None
        if trained is not None and trained > self.config.max_phrase_len:
            logger.warning(
                f"phrase table was built with max_phrase_len {trained}; "
                f"the decoder only looks up phrases up to {self.config.max_phrase_len} tokens"
            )
        return trained

    def load_models(self) -> LoadedModels:
        model_dir = self.model_directory
        src_path = model_dir.truecase_path(self.config.src_lang)
        tgt_path = model_dir.truecase_path(self.config.tgt_lang)
        model_dir.require([src_path, tgt_path, model_dir.lm_path, model_dir.path(PHRASE_TABLE)])
        self.check_phrase_length(model_dir)

        with stage("load-models"):
            src_config, tgt_config = self.clean_configs()
            weights_path = model_dir.path(WEIGHTS)
            weights = (
                self.model_repository.load_weights(weights_path) if weights_path.is_file() else FeatureWeights()
            )
            models = TranslationModels(
                phrase_table=self.model_repository.load_phrase_table(model_dir.path(PHRASE_TABLE)),
                lm=self.model_repository.load_arpa(model_dir.lm_path),
                config=self.config.decoder_config(),
            )
            return LoadedModels(
                models=models,
                weights=weights,
                source=SidePreprocessor(src_config, self.model_repository.load_truecase(src_path)),
                target=SidePreprocessor(tgt_config, self.model_repository.load_truecase(tgt_path)),
            )

    # ------------------------------------------------------------------
    # チューニング
    # ------------------------------------------------------------------

    def load_dev(self) -> ParallelCorpus:
        if self.config.dev_prefix:
            return self.load_corpus(self.config.dev_paths())
        if self.config.flores_dir:
            src_profile, tgt_profile = self.config.profiles()
            with stage("load"):
                return self.corpus_service.load_flores(Path(self.config.flores_dir), "dev", src_profile, tgt_profile)
        raise ValidationError("tuning needs dev_prefix or flores_dir", stage="config")

    def tune(self) -> TuneReport:
        """開発セットで重みを調整し、weights と tune-report を書き出す"""
        # FLORES の dev 分割を使う場合は dev_prefix 不要
        self.check("tune" if self.config.dev_prefix or not self.config.flores_dir else "")
        loaded = self.load_models()
        dev = self.load_dev()
        if len(dev) == 0:
            raise DataError("empty dev set", stage="tune")

        started = utc_timestamp()
        with stage("tune"):
            sources = [self.preprocess_service.prepare_line(p.source, loaded.source) for p in dev]
            references = [self.preprocess_service.prepare_line(p.target, loaded.target) for p in dev]
            tuner = TuningService(self.decoder_service, self.evaluation_service, self.config.ribes_config())
            report = tuner.tune_weights(
                sources, references, loaded.models, loaded.weights, self.config.tune_metric, self.config.tune_passes
            )
            model_dir = self.model_directory
            self.model_repository.save_weights(model_dir.path(WEIGHTS), report.accepted)
            self.model_repository.save_tune_report(model_dir.path(TUNE_REPORT), report)

        dev_inputs = list(self.config.dev_paths()) if self.config.dev_prefix else []
        model_dir.record_stage(
            "tune",
            self.config.stage_params("tune_metric", "tune_passes", "stack_size", "distortion_limit"),
            dev_inputs + [model_dir.path(PHRASE_TABLE), model_dir.lm_path],
            [model_dir.path(WEIGHTS), model_dir.path(TUNE_REPORT)],
            started,
        )
        return report

    # ------------------------------------------------------------------
    # 翻訳
    # ------------------------------------------------------------------

    def test_side(self, index: int) -> Path:
        """テストセットの原言語側 (0) または目的言語側 (1)"""
        if not self.config.test_prefix:
            raise ValidationError("no input file given and test_prefix is not set", stage="config")
        return self.config.test_paths()[index]

    def translate(self, input_path: Optional[Path], output_path: Path, trace: bool = False) -> Path:
        """1行1文の入力を翻訳し、同じ行数の出力を書き出す（入力省略時はテストセット）"""
        self.check("translate")
        input_path = input_path or self.test_side(0)
        loaded = self.load_models()
        with stage("load"):
            lines = self.text_repository.read_lines(input_path)

        outputs: List[str] = []
        traces: List[str] = []
        with stage("decode"):
            for line_no, line in enumerate(lines, start=1):
                tokens = self.preprocess_service.prepare_line(line, loaded.source)
                result = self.decoder_service.decode(tokens, loaded.models, loaded.weights)
                outputs.append(self.preprocess_service.postprocess(result.tokens, loaded.target.profile))
                if trace:
                    traces.append(f"# {line_no} score {result.derivation.score:.6f}")
                    if result.derivation.steps:
                        traces.append(result.derivation.format_trace(loaded.weights))

        with stage("write"):
            self.text_repository.write_lines(output_path, outputs)
            if trace:
                self.text_repository.write_lines(Path(f"{output_path}.trace"), traces)
        logger.info(f"Translated {len(lines)} lines into {output_path}")
        return Path(output_path)

    # ------------------------------------------------------------------
    # 評価
    # ------------------------------------------------------------------

    def _evaluation_side(self) -> Optional[SidePreprocessor]:
        """評価時の正規化（目的言語のクリーニング + 学習済みトゥルーケーサー）"""
        if not self.config.tgt_lang:
            return None
        _, tgt_config = self.clean_configs()
        truecase_path = self.model_directory.truecase_path(self.config.tgt_lang)
        truecaser = self.model_repository.load_truecase(truecase_path) if truecase_path.is_file() else None
        return SidePreprocessor(tgt_config, truecaser)

    def evaluate(
        self, hyp_path: Path, ref_path: Optional[Path] = None, per_sentence: bool = False
    ) -> EvaluationResult:
        """仮説ファイルと参照訳ファイルを評価（参照訳省略時はテストセット）"""
        self.check("evaluate")
        ref_path = ref_path or self.test_side(1)
        with stage("load"):
            hyp_lines = self.text_repository.read_lines(hyp_path)
            ref_lines = self.text_repository.read_lines(ref_path)
            if len(hyp_lines) != len(ref_lines):
                raise DataError(f"line count mismatch {len(hyp_lines)} vs {len(ref_lines)}")

        with stage("evaluate"):
            side = self._evaluation_side()
            prepare = (lambda line: self.preprocess_service.prepare_line(line, side)) if side else str.split
            hyps = [prepare(line) for line in hyp_lines]
            refs = [prepare(line) for line in ref_lines]
            return self.evaluation_service.evaluate(
                hyps,
                refs,
                pair=f"{self.config.src_lang}-{self.config.tgt_lang}",
                direction=f"{self.config.src_lang}->{self.config.tgt_lang}",
                ribes_config=self.config.ribes_config(),
                per_sentence=per_sentence,
            )

    def reference_ogive(self, ref_path: Path, thresholds=OGIVE_THRESHOLDS) -> pd.DataFrame:
        """参照訳のトークン長の累積割合"""
        lines = self.text_repository.read_lines(ref_path)
        if not lines:
            raise DataError("empty corpus")
        lengths = [len(line.split()) for line in lines]
        return pd.DataFrame({
            "threshold": list(thresholds),
            "reference": [sum(1 for n in lengths if n < t) / len(lengths) for t in thresholds],
        })
