"""
対訳コーパス サービス（読み込み・フィルタ・統計）
"""

from collections import Counter
from pathlib import Path
from typing import Dict, List, Sequence

import pandas as pd
from loguru import logger

from ..exceptions import DataError, ValidationError
from ..models.corpus import CorpusStats, LanguageProfile, ParallelCorpus, SentencePair
from ..storage.repositories.corpus_repository import CorpusRepository

SOURCE = "source"
TARGET = "target"

FLORES_SPLITS = ("dev", "devtest")
OGIVE_THRESHOLDS = (4, 8, 16, 32, 64)


class CorpusService:
    """対訳コーパスサービス"""

    def __init__(self, repository: CorpusRepository = None):
        self.repository = repository or CorpusRepository()

    def load_parallel(
        self,
        src_path: Path,
        tgt_path: Path,
        src_profile: LanguageProfile,
        tgt_profile: LanguageProfile,
    ) -> ParallelCorpus:
        """2つのファイルを行単位で対にして読み込む"""
        src_lines = self.repository.read_lines(src_path)
        tgt_lines = self.repository.read_lines(tgt_path)
        if len(src_lines) != len(tgt_lines):
            raise DataError(f"line count mismatch {len(src_lines)} vs {len(tgt_lines)}")

        pairs = [
            SentencePair(source=src, target=tgt, line_no=line_no)
            for line_no, (src, tgt) in enumerate(zip(src_lines, tgt_lines), start=1)
        ]
        logger.info(f"Loaded {len(pairs)} sentence pairs from {src_path} / {tgt_path}")
        return ParallelCorpus(pairs=pairs, src_profile=src_profile, tgt_profile=tgt_profile)

    def write_parallel(self, corpus: ParallelCorpus, src_path: Path, tgt_path: Path):
        """両側を1行1文で書き出す"""
        self.repository.write_lines(src_path, corpus.side(SOURCE))
        self.repository.write_lines(tgt_path, corpus.side(TARGET))
        logger.info(f"Wrote {len(corpus)} sentence pairs to {src_path} / {tgt_path}")

    def load_flores(
        self,
        flores_dir: Path,
        split: str,
        src_profile: LanguageProfile,
        tgt_profile: LanguageProfile,
    ) -> ParallelCorpus:
        """Flores-200形式 <dir>/<split>/<flores_code>.<split> の読み込み"""
        if split not in FLORES_SPLITS:
            raise ValidationError(f"unknown Flores split {split!r}; expected one of {FLORES_SPLITS}")
        for profile in (src_profile, tgt_profile):
            if not profile.flores_code:
                raise ValidationError(f"profile {profile.code} has no Flores file tag")
        split_dir = Path(flores_dir) / split
        return self.load_parallel(
            split_dir / f"{src_profile.flores_code}.{split}",
            split_dir / f"{tgt_profile.flores_code}.{split}",
            src_profile,
            tgt_profile,
        )

    @staticmethod
    def filter_pairs(corpus: ParallelCorpus, max_len: int = 80, max_ratio: float = 9.0) -> ParallelCorpus:
        """空・長すぎる・長さ比の大きいペアを除外（順序は維持）"""
        if max_len < 1:
            raise ValidationError("max_len must be >= 1")
        if max_ratio < 1:
            raise ValidationError("max_ratio must be >= 1")

        kept: List[SentencePair] = []
        for pair in corpus:
            src_len, tgt_len = len(pair.source_tokens), len(pair.target_tokens)
            if src_len == 0 or tgt_len == 0:
                continue
            if src_len > max_len or tgt_len > max_len:
                continue
            if max(src_len, tgt_len) > max_ratio * min(src_len, tgt_len):
                continue
            kept.append(pair)

        logger.info(f"Filtered corpus: kept {len(kept)} of {len(corpus)} pairs")
        return corpus.with_pairs(kept)

    @staticmethod
    def _lengths(corpus: ParallelCorpus, side: str) -> List[int]:
        return [len(sentence.split()) for sentence in corpus.side(side)]

    @staticmethod
    def length_ogive(corpus: ParallelCorpus, threshold: int, side: str = SOURCE) -> float:
        """トークン数が閾値未満の文の割合"""
        if len(corpus) == 0:
            raise DataError("empty corpus")
        lengths = CorpusService._lengths(corpus, side)
        return sum(1 for length in lengths if length < threshold) / len(lengths)

    @staticmethod
    def corpus_stats(corpus: ParallelCorpus) -> CorpusStats:
        """両側のトークン長ヒストグラム"""
        histograms: Dict[str, Dict[int, int]] = {}
        for side in (SOURCE, TARGET):
            histograms[side] = dict(sorted(Counter(CorpusService._lengths(corpus, side)).items()))
        return CorpusStats(
            pair_count=len(corpus),
            source_histogram=histograms[SOURCE],
            target_histogram=histograms[TARGET],
        )

    @staticmethod
    def ogive_table(corpus: ParallelCorpus, thresholds: Sequence[int] = OGIVE_THRESHOLDS) -> pd.DataFrame:
        """閾値ごとの累積割合（閾値未満の文の割合）"""
        rows = []
        for threshold in thresholds:
            rows.append({
                "threshold": threshold,
                SOURCE: CorpusService.length_ogive(corpus, threshold, SOURCE),
                TARGET: CorpusService.length_ogive(corpus, threshold, TARGET),
            })
        return pd.DataFrame(rows, columns=["threshold", SOURCE, TARGET])

    @staticmethod
    def histogram_frame(stats: CorpusStats) -> pd.DataFrame:
        """トークン長ヒストグラムの表"""
        lengths = sorted(set(stats.source_histogram) | set(stats.target_histogram))
        return pd.DataFrame({
            "tokens": lengths,
            SOURCE: [stats.source_histogram.get(n, 0) for n in lengths],
            TARGET: [stats.target_histogram.get(n, 0) for n in lengths],
        })
