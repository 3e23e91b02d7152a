"""
前処理サービス（クリーニング → トークン化 → トゥルーケーシング、後処理）
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from loguru import logger

from ..models.corpus import LanguageProfile, ParallelCorpus, SentencePair
from ..models.preprocess import CleanConfig, TruecaseModel
from ..utils.text_processing import TextProcessor
from .truecase_service import TruecaseService


@dataclass
class SidePreprocessor:
    """片側の前処理設定（クリーニング設定とトゥルーケーサー）"""
    clean_config: CleanConfig
    truecaser: Optional[TruecaseModel] = None

    @property
    def profile(self) -> LanguageProfile:
        return self.clean_config.profile


class PreprocessService:
    """前処理サービス"""

    def __init__(self, truecase_service: TruecaseService = None):
        self.truecase_service = truecase_service or TruecaseService()

    @staticmethod
    def clean_corpus(corpus: ParallelCorpus, src_config: CleanConfig, tgt_config: CleanConfig) -> ParallelCorpus:
        """全ペアの両側をクリーニング"""
        pairs = [
            SentencePair(
                source=TextProcessor.clean_line(pair.source, src_config),
                target=TextProcessor.clean_line(pair.target, tgt_config),
                line_no=pair.line_no,
            )
            for pair in corpus
        ]
        logger.info(f"Cleaned {len(pairs)} sentence pairs")
        return corpus.with_pairs(pairs)

    @staticmethod
    def tokenize(line: str, profile: LanguageProfile) -> List[str]:
        """トークン化して冗長な句読点を除去"""
        return TextProcessor.strip_redundant_punct(TextProcessor.tokenize(line, profile))

    def tokenize_corpus(self, corpus: ParallelCorpus) -> ParallelCorpus:
        """全ペアをトークン化し、空白区切りの文として保持"""
        pairs = [
            SentencePair(
                source=" ".join(self.tokenize(pair.source, corpus.src_profile)),
                target=" ".join(self.tokenize(pair.target, corpus.tgt_profile)),
                line_no=pair.line_no,
            )
            for pair in corpus
        ]
        return corpus.with_pairs(pairs)

    def train_truecasers(self, corpus: ParallelCorpus) -> Tuple[TruecaseModel, TruecaseModel]:
        """トークン化済みコーパスの両側でトゥルーケーサーを学習"""
        src_model = self.truecase_service.train([p.source_tokens for p in corpus])
        tgt_model = self.truecase_service.train([p.target_tokens for p in corpus])
        return src_model, tgt_model

    def truecase_corpus(
        self, corpus: ParallelCorpus, src_model: TruecaseModel, tgt_model: TruecaseModel
    ) -> ParallelCorpus:
        pairs = [
            SentencePair(
                source=" ".join(self.truecase_service.truecase(p.source_tokens, src_model)),
                target=" ".join(self.truecase_service.truecase(p.target_tokens, tgt_model)),
                line_no=p.line_no,
            )
            for p in corpus
        ]
        return corpus.with_pairs(pairs)

    def prepare_line(self, line: str, side: SidePreprocessor) -> List[str]:
        """1行をクリーニング・トークン化・トゥルーケーシング"""
        tokens = self.tokenize(TextProcessor.clean_line(line, side.clean_config), side.profile)
        if side.truecaser is not None:
            tokens = self.truecase_service.truecase(tokens, side.truecaser)
        return tokens

    @staticmethod
    def postprocess(tokens: Sequence[str], profile: LanguageProfile) -> str:
        """冗長な句読点を除去して詳細化"""
        return TextProcessor.detokenize(TextProcessor.strip_redundant_punct(list(tokens)), profile)
