"""
単語アライメント サービス（IBMモデル1/2のEM学習・ビタビ・対称化）
"""

import math
from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from loguru import logger

from ..exceptions import DataError, ValidationError
from ..models.alignment import (
    GROW_DIAG_FINAL,
    GROW_DIAG_FINAL_AND,
    HEURISTICS,
    INTERSECTION,
    NULL,
    NULL_POSITION,
    UNION,
    AlignmentMatrix,
    AlignmentModel,
    Ibm2Distortion,
    LexicalTable,
)
from ..utils.prob_utils import ProbUtils

TokenPair = Tuple[Sequence[str], Sequence[str]]

# 近傍の走査順: N, S, E, W, NE, NW, SE, SW
NEIGHBORS = ((-1, 0), (1, 0), (0, 1), (0, -1), (-1, 1), (-1, -1), (1, 1), (1, -1))


def _check_training_input(pairs: Sequence[TokenPair], iterations: int):
    if iterations < 1:
        raise ValidationError(f"EM iterations must be >= 1, got {iterations}")
    if not pairs:
        raise DataError("empty corpus")


class AlignmentService:
    """単語アライメントサービス"""

    # ------------------------------------------------------------------
    # IBM Model 1
    # ------------------------------------------------------------------

    @staticmethod
    def initial_lexical_table(pairs: Sequence[TokenPair]) -> LexicalTable:
        """共起する語対上の一様分布で初期化"""
        cooccur: Dict[str, Set[str]] = defaultdict(set)
        for src, tgt in pairs:
            for e in (NULL, *src):
                cooccur[e].update(tgt)
        t = {}
        for e, targets in cooccur.items():
            for f in targets:
                t[(e, f)] = 1.0 / len(targets)
        return LexicalTable(t=t)

    @staticmethod
    def score_matrix(
        src: Sequence[str],
        tgt: Sequence[str],
        lexical: LexicalTable,
        distortion: Optional[Ibm2Distortion] = None,
    ) -> np.ndarray:
        """(目的言語語数 × (NULL + 原言語語数)) の t·a 行列"""
        sources = (NULL, *src)
        l, m = len(src), len(tgt)
        scores = np.array(
            [[lexical.prob(e, f) for e in sources] for f in tgt], dtype=float
        ).reshape(m, l + 1)
        if distortion is not None:
            a = np.array(
                [[distortion.prob(i, j, l, m) for i in range(NULL_POSITION, l)] for j in range(m)],
                dtype=float,
            ).reshape(m, l + 1)
            scores = scores * a
        return scores

    def alignment_posteriors(
        self,
        src: Sequence[str],
        tgt: Sequence[str],
        lexical: LexicalTable,
        distortion: Optional[Ibm2Distortion] = None,
    ) -> np.ndarray:
        """各目的言語語がどの原言語位置（列0はNULL）に対応するかの事後確率"""
        posteriors, _ = ProbUtils.row_posteriors(self.score_matrix(src, tgt, lexical, distortion))
        return posteriors

    def train_ibm1(
        self, pairs: Sequence[TokenPair], iterations: int = 5, init: LexicalTable = None
    ) -> Tuple[LexicalTable, List[float]]:
        """IBMモデル1のEM学習（反復ごとの対数尤度も返す）"""
        _check_training_input(pairs, iterations)
        lexical = init or self.initial_lexical_table(pairs)
        log_likelihoods = []

        for iteration in range(1, iterations + 1):
            contributions: Dict[Tuple[str, str], List[float]] = defaultdict(list)
            ll_terms: List[float] = []
            for src, tgt in pairs:
                if not tgt:
                    continue
                scores = self.score_matrix(src, tgt, lexical)
                posteriors, totals = ProbUtils.row_posteriors(scores)
                ll_terms.extend(np.log(totals).tolist())
                ll_terms.append(-len(tgt) * math.log(len(src) + 1))
                sources = (NULL, *src)
                for j, f in enumerate(tgt):
                    for i, e in enumerate(sources):
                        contributions[(e, f)].append(float(posteriors[j, i]))

            log_likelihood = math.fsum(ll_terms)
            log_likelihoods.append(log_likelihood)
            counts = ProbUtils.exact_sums(contributions)
            lexical = LexicalTable(t=ProbUtils.normalize_grouped(counts, lambda key: key[0]))
            logger.info(f"IBM1 iteration {iteration}: log-likelihood {log_likelihood:.6f}")

        return lexical, log_likelihoods

    # ------------------------------------------------------------------
    # IBM Model 2
    # ------------------------------------------------------------------

    @staticmethod
    def initial_distortion(pairs: Sequence[TokenPair]) -> Ibm2Distortion:
        a = {}
        for src, tgt in pairs:
            l, m = len(src), len(tgt)
            for j in range(m):
                for i in range(NULL_POSITION, l):
                    a[(i, j, l, m)] = 1.0 / (l + 1)
        return Ibm2Distortion(a=a)

    def train_ibm2(
        self, pairs: Sequence[TokenPair], iterations: int = 5, init: LexicalTable = None
    ) -> Tuple[LexicalTable, Ibm2Distortion, List[float]]:
        """IBMモデル2のEM学習（語彙・位置歪みの同時推定）"""
        _check_training_input(pairs, iterations)
        if init is None:
            raise ValidationError("IBM2 training needs an IBM1 lexical table as initialization")
        lexical = init
        distortion = self.initial_distortion(pairs)
        log_likelihoods = []

        for iteration in range(1, iterations + 1):
            t_contributions: Dict[Tuple[str, str], List[float]] = defaultdict(list)
            a_contributions: Dict[Tuple[int, int, int, int], List[float]] = defaultdict(list)
            ll_terms: List[float] = []
            for src, tgt in pairs:
                if not tgt:
                    continue
                l, m = len(src), len(tgt)
                posteriors, totals = ProbUtils.row_posteriors(
                    self.score_matrix(src, tgt, lexical, distortion)
                )
                ll_terms.extend(np.log(totals).tolist())
                sources = (NULL, *src)
                for j, f in enumerate(tgt):
                    for column, e in enumerate(sources):
                        value = float(posteriors[j, column])
                        t_contributions[(e, f)].append(value)
                        a_contributions[(column - 1, j, l, m)].append(value)

            log_likelihood = math.fsum(ll_terms)
            log_likelihoods.append(log_likelihood)
            lexical = LexicalTable(
                t=ProbUtils.normalize_grouped(ProbUtils.exact_sums(t_contributions), lambda key: key[0])
            )
            distortion = Ibm2Distortion(
                a=ProbUtils.normalize_grouped(ProbUtils.exact_sums(a_contributions), lambda key: key[1:])
            )
            logger.info(f"IBM2 iteration {iteration}: log-likelihood {log_likelihood:.6f}")

        return lexical, distortion, log_likelihoods

    def train_direction(
        self, pairs: Sequence[TokenPair], ibm1_iterations: int = 5, ibm2_iterations: int = 5
    ) -> AlignmentModel:
        """IBM1 → IBM2 の順に一方向のモデルを学習"""
        ibm1, ibm1_ll = self.train_ibm1(pairs, ibm1_iterations)
        lexical, distortion, ibm2_ll = self.train_ibm2(pairs, ibm2_iterations, init=ibm1)
        return AlignmentModel(
            lexical=lexical,
            distortion=distortion,
            ibm1_log_likelihoods=ibm1_ll,
            ibm2_log_likelihoods=ibm2_ll,
        )

    # ------------------------------------------------------------------
    # ビタビアライメント
    # ------------------------------------------------------------------

    @staticmethod
    def viterbi_align(
        src: Sequence[str],
        tgt: Sequence[str],
        lexical: LexicalTable,
        distortion: Optional[Ibm2Distortion] = None,
    ) -> AlignmentMatrix:
        """各目的言語語を最尤の原言語位置へ対応付け（NULLはリンクなし）"""
        l, m = len(src), len(tgt)
        links = []
        for j, f in enumerate(tgt):
            best_i, best = None, 0.0
            for i, e in enumerate(src):
                a = distortion.prob(i, j, l, m) if distortion is not None else 1.0
                score = lexical.prob(e, f) * a
                if score > best:
                    best_i, best = i, score
            a_null = distortion.prob(NULL_POSITION, j, l, m) if distortion is not None else 1.0
            # NULL は位置 -1 扱いのため同点なら NULL（リンクなし）
            if best_i is not None and best > lexical.prob(NULL, f) * a_null:
                links.append((best_i, j))
        return AlignmentMatrix.of(links, l, m)

    def align_corpus(
        self, pairs: Sequence[TokenPair], forward: AlignmentModel, reverse: AlignmentModel,
        heuristic: str = GROW_DIAG_FINAL_AND,
    ) -> List[AlignmentMatrix]:
        """両方向のビタビアライメントを対称化"""
        alignments = []
        for src, tgt in pairs:
            fwd = self.viterbi_align(src, tgt, forward.lexical, forward.distortion)
            rev = self.viterbi_align(tgt, src, reverse.lexical, reverse.distortion).transpose()
            alignments.append(self.symmetrize(fwd, rev, heuristic))
        logger.info(f"Aligned {len(alignments)} sentence pairs with {heuristic}")
        return alignments

    # ------------------------------------------------------------------
    # 対称化
    # ------------------------------------------------------------------

    @staticmethod
    def symmetrize(fwd: AlignmentMatrix, rev: AlignmentMatrix, heuristic: str = GROW_DIAG_FINAL_AND) -> AlignmentMatrix:
        """2方向のアライメントを統合"""
        if heuristic not in HEURISTICS:
            raise ValidationError(f"unknown symmetrization heuristic {heuristic!r}")
        if (fwd.src_len, fwd.tgt_len) != (rev.src_len, rev.tgt_len):
            raise ValidationError(
                f"alignment dimension mismatch {fwd.src_len}x{fwd.tgt_len} "
                f"vs {rev.src_len}x{rev.tgt_len}"
            )

        union = fwd.links | rev.links
        if heuristic == INTERSECTION:
            return AlignmentMatrix.of(fwd.links & rev.links, fwd.src_len, fwd.tgt_len)
        if heuristic == UNION:
            return AlignmentMatrix.of(union, fwd.src_len, fwd.tgt_len)

        points = set(fwd.links & rev.links)
        aligned_src = {i for i, _ in points}
        aligned_tgt = {j for _, j in points}

        added = True
        while added:
            added = False
            for i, j in sorted(points):
                for di, dj in NEIGHBORS:
                    point = (i + di, j + dj)
                    if point not in union or point in points:
                        continue
                    if point[0] not in aligned_src or point[1] not in aligned_tgt:
                        points.add(point)
                        aligned_src.add(point[0])
                        aligned_tgt.add(point[1])
                        added = True

        if heuristic in (GROW_DIAG_FINAL, GROW_DIAG_FINAL_AND):
            for i, j in sorted(union):
                if (i, j) in points:
                    continue
                src_free, tgt_free = i not in aligned_src, j not in aligned_tgt
                ok = (src_free and tgt_free) if heuristic == GROW_DIAG_FINAL_AND else (src_free or tgt_free)
                if ok:
                    points.add((i, j))
                    aligned_src.add(i)
                    aligned_tgt.add(j)

        return AlignmentMatrix.of(points, fwd.src_len, fwd.tgt_len)
