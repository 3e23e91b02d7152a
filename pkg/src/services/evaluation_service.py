"""
評価指標サービス（BLEU / RIBES / METEOR）
"""

import math
from collections import Counter
from functools import lru_cache
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import pandas as pd
from loguru import logger

from ..exceptions import DataError, ValidationError
from ..models.evaluation import (
    BleuReport,
    EvaluationResult,
    MeteorReport,
    RibesConfig,
    RibesReport,
    SentenceScores,
)
from ..utils.prob_utils import ProbUtils

RIBES = "ribes"
METEOR = "meteor"


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[k:k + n]) for k in range(len(tokens) - n + 1))


def brevity_penalty(hyp_len: int, ref_len: int) -> float:
    if hyp_len == 0:
        return 0.0 if ref_len > 0 else 1.0
    if hyp_len > ref_len:
        return 1.0
    return math.exp(1.0 - ref_len / hyp_len)


def _check_parallel(hyps: Sequence, refs: Sequence):
    if len(hyps) != len(refs):
        raise DataError(f"hypothesis/reference count mismatch {len(hyps)} vs {len(refs)}")


class EvaluationService:
    """評価指標サービス"""

    # ------------------------------------------------------------------
    # BLEU
    # ------------------------------------------------------------------

    @staticmethod
    def _clipped_counts(hyp: Sequence[str], ref: Sequence[str], n: int) -> Tuple[int, int]:
        hyp_counts = ngrams(hyp, n)
        ref_counts = ngrams(ref, n)
        matched = sum(min(count, ref_counts[gram]) for gram, count in hyp_counts.items())
        return matched, max(len(hyp) - n + 1, 0)

    def bleu_corpus(
        self, hyps: Sequence[Sequence[str]], refs: Sequence[Sequence[str]], max_n: int = 4
    ) -> BleuReport:
        """コーパスBLEU（平滑化なし）"""
        _check_parallel(hyps, refs)
        if max_n < 1:
            raise ValidationError(f"max_n must be >= 1, got {max_n}")

        matched = [0] * max_n
        totals = [0] * max_n
        hyp_len = ref_len = 0
        for hyp, ref in zip(hyps, refs):
            hyp_len += len(hyp)
            ref_len += len(ref)
            for n in range(1, max_n + 1):
                m, t = self._clipped_counts(hyp, ref, n)
                matched[n - 1] += m
                totals[n - 1] += t

        precisions = [m / t if t > 0 else 0.0 for m, t in zip(matched, totals)]
        bp = brevity_penalty(hyp_len, ref_len)
        # 仮説側にn-gramが1つもない次数は幾何平均から外す
        effective = [p for p, t in zip(precisions, totals) if t > 0]
        if hyp_len == 0 or any(p == 0.0 for p in effective):
            score = 0.0
        else:
            score = bp * math.exp(math.fsum(math.log(p) for p in effective) / len(effective))
        return BleuReport(
            score=min(score, 1.0),
            precisions=precisions,
            brevity_penalty=bp,
            hyp_len=hyp_len,
            ref_len=ref_len,
        )

    def sentence_bleu(self, hyp: Sequence[str], ref: Sequence[str], max_n: int = 4) -> float:
        """文単位BLEU（n≥2で一致数0のとき分子・分母に1を加える）"""
        if not hyp:
            return 0.0
        log_sum = 0.0
        for n in range(1, max_n + 1):
            m, t = self._clipped_counts(hyp, ref, n)
            if m == 0:
                if n == 1:
                    return 0.0
                m, t = 1, t + 1
            log_sum += math.log(m / t)
        return min(brevity_penalty(len(hyp), len(ref)) * math.exp(log_sum / max_n), 1.0)

    # ------------------------------------------------------------------
    # RIBES
    # ------------------------------------------------------------------

    @staticmethod
    def kendall_tau(ranks: Sequence[int]) -> Optional[float]:
        """(一致対 - 不一致対) / C(n,2)、2個未満なら None"""
        if len(ranks) < 2:
            return None
        if len(set(ranks)) != len(ranks):
            raise ValidationError("kendall_tau requires distinct ranks")
        concordant = discordant = 0
        for a in range(len(ranks)):
            for b in range(a + 1, len(ranks)):
                if ranks[a] < ranks[b]:
                    concordant += 1
                else:
                    discordant += 1
        return (concordant - discordant) / (len(ranks) * (len(ranks) - 1) / 2)

    @staticmethod
    def _unique_position(sequence: Sequence, item) -> Optional[int]:
        positions = [k for k, value in enumerate(sequence) if value == item]
        return positions[0] if len(positions) == 1 else None

    def ribes_ranks(self, hyp: Sequence[str], ref: Sequence[str]) -> List[int]:
        """仮説語に対応する参照訳の位置（仮説の語順）"""
        hyp_bigrams = list(zip(hyp, hyp[1:]))
        ref_bigrams = list(zip(ref, ref[1:]))
        used = set()
        ranks = []
        for k, word in enumerate(hyp):
            position = None
            if hyp.count(word) == 1 and ref.count(word) == 1:
                position = ref.index(word)
            else:
                if k > 0:
                    left = (hyp[k - 1], word)
                    if self._unique_position(hyp_bigrams, left) is not None:
                        start = self._unique_position(ref_bigrams, left)
                        if start is not None:
                            position = start + 1
                if position is None and k + 1 < len(hyp):
                    right = (word, hyp[k + 1])
                    if self._unique_position(hyp_bigrams, right) is not None:
                        position = self._unique_position(ref_bigrams, right)
            if position is None or position in used:
                continue
            used.add(position)
            ranks.append(position)
        return ranks

    def ribes_sentence(
        self, hyp: Sequence[str], ref: Sequence[str], config: RibesConfig = None
    ) -> RibesReport:
        """RIBES = NKT · p1^α · BP^β"""
        config = config or RibesConfig()
        hyp, ref = list(hyp), list(ref)
        if hyp == ref:
            return RibesReport(tau=1.0, nkt=1.0, p1=1.0, bp=1.0, score=1.0, matches=len(hyp))

        ranks = self.ribes_ranks(hyp, ref)
        bp = brevity_penalty(len(hyp), len(ref))
        p1 = len(ranks) / len(hyp) if hyp else 0.0
        tau = self.kendall_tau(ranks)
        if tau is None:
            return RibesReport(tau=-1.0, nkt=0.0, p1=p1, bp=bp, score=0.0, matches=len(ranks))

        nkt = (tau + 1.0) / 2.0
        score = nkt * (p1 ** config.alpha) * (bp ** config.beta)
        return RibesReport(tau=tau, nkt=nkt, p1=p1, bp=bp, score=score, matches=len(ranks))

    # ------------------------------------------------------------------
    # METEOR
    # ------------------------------------------------------------------

    @staticmethod
    def meteor_alignment(hyp: Sequence[str], ref: Sequence[str]) -> Tuple[int, int]:
        """完全一致のユニグラム対応で一致数を最大化し、チャンク数を最小化（メモ化した厳密探索）"""
        hyp, ref = tuple(hyp), tuple(ref)
        hyp_counts, ref_counts = Counter(hyp), Counter(ref)
        target = {word: min(count, ref_counts[word]) for word, count in hyp_counts.items()}
        matches = sum(target.values())
        if matches == 0:
            return 0, 0

        ref_positions: Dict[str, List[int]] = {}
        for position, word in enumerate(ref):
            ref_positions.setdefault(word, []).append(position)
        ref_bigrams = set(zip(ref, ref[1:]))

        n = len(hyp)
        adjacent = [1 if (hyp[p], hyp[p + 1]) in ref_bigrams else 0 for p in range(n - 1)] + [0]
        future = [0] * (n + 1)
        for p in range(n - 1, -1, -1):
            future[p] = future[p + 1] + adjacent[p]
        remaining = [0] * n
        seen: Counter = Counter()
        for p in range(n - 1, -1, -1):
            seen[hyp[p]] += 1
            remaining[p] = seen[hyp[p]]
        # k 以降に現れる語（使用済み集合はこれらの語の位置だけを覚える）
        words_after = [frozenset(hyp[k:]) for k in range(n + 1)]

        def state(k: int, used: FrozenSet[int], last: Optional[int]) -> Tuple:
            used = frozenset(r for r in used if ref[r] in words_after[k])
            if last is not None and not (k < n and last + 1 < len(ref) and ref[last + 1] == hyp[k]):
                last = None
            return k, last, used

        @lru_cache(maxsize=None)
        def links_from(k: int, previous: Optional[int], used: FrozenSet[int]) -> int:
            """k 以降で得られる隣接リンク数の最大値"""
            if k == n:
                return 0
            bound = future[k] + (1 if previous is not None else 0)
            word = hyp[k]
            candidates = [r for r in ref_positions.get(word, ()) if r not in used]
            need = target.get(word, 0) - (len(ref_positions.get(word, ())) - len(candidates))
            best = -1
            if need > 0:
                if previous is not None and previous + 1 in candidates:
                    candidates.remove(previous + 1)
                    candidates.insert(0, previous + 1)
                for r in candidates:
                    gain = 1 if previous is not None and r == previous + 1 else 0
                    best = max(best, gain + links_from(*state(k + 1, used | {r}, r)))
                    if best == bound:
                        return best
            # 残りの出現だけで必要数を満たせる場合のみ未対応にできる
            if remaining[k] - 1 >= need:
                best = max(best, links_from(*state(k + 1, used, None)))
            return best

        return matches, matches - links_from(0, None, frozenset())

    def meteor_sentence(self, hyp: Sequence[str], ref: Sequence[str]) -> MeteorReport:
        """METEOR（完全一致のみ、チャンク1個ならペナルティ0）"""
        matches, chunks = self.meteor_alignment(list(hyp), list(ref))
        if matches == 0:
            return MeteorReport(matches=0, chunks=0, precision=0.0, recall=0.0, fmean=0.0, penalty=0.0, score=0.0)

        precision = matches / len(hyp)
        recall = matches / len(ref)
        fmean = 10.0 * precision * recall / (recall + 9.0 * precision)
        penalty = 0.5 * (chunks / matches) ** 3 if chunks > 1 else 0.0
        return MeteorReport(
            matches=matches,
            chunks=chunks,
            precision=precision,
            recall=recall,
            fmean=fmean,
            penalty=penalty,
            score=fmean * (1.0 - penalty),
        )

    # ------------------------------------------------------------------
    # コーパス集計・レポート
    # ------------------------------------------------------------------

    def metric_corpus(
        self,
        metric: str,
        hyps: Sequence[Sequence[str]],
        refs: Sequence[Sequence[str]],
        ribes_config: RibesConfig = None,
    ) -> float:
        """文単位スコアの算術平均"""
        _check_parallel(hyps, refs)
        if not hyps:
            raise DataError("empty evaluation set")
        if metric == RIBES:
            scores = [self.ribes_sentence(h, r, ribes_config).score for h, r in zip(hyps, refs)]
        elif metric == METEOR:
            scores = [self.meteor_sentence(h, r).score for h, r in zip(hyps, refs)]
        else:
            raise ValidationError(f"unknown sentence-level metric {metric!r}")
        return ProbUtils.mean(scores)

    def evaluate(
        self,
        hyps: Sequence[Sequence[str]],
        refs: Sequence[Sequence[str]],
        pair: str = "",
        direction: str = "",
        ribes_config: RibesConfig = None,
        per_sentence: bool = False,
    ) -> EvaluationResult:
        """BLEU・RIBES・METEORをまとめて計算"""
        _check_parallel(hyps, refs)
        if not hyps:
            raise DataError("empty evaluation set")
        ribes_config = ribes_config or RibesConfig()

        sentences = []
        if per_sentence:
            for index, (hyp, ref) in enumerate(zip(hyps, refs), start=1):
                sentences.append(SentenceScores(
                    index=index,
                    bleu=self.sentence_bleu(hyp, ref),
                    ribes=self.ribes_sentence(hyp, ref, ribes_config).score,
                    meteor=self.meteor_sentence(hyp, ref).score,
                ))

        result = EvaluationResult(
            pair=pair,
            direction=direction,
            bleu=self.bleu_corpus(hyps, refs),
            ribes=self.metric_corpus(RIBES, hyps, refs, ribes_config),
            meteor=self.metric_corpus(METEOR, hyps, refs),
            ribes_config=ribes_config,
            sentences=sentences,
        )
        logger.info(
            f"Evaluated {len(hyps)} sentences: BLEU {result.bleu.score * 100:.2f}, "
            f"RIBES {result.ribes:.4f}, METEOR {result.meteor:.4f}"
        )
        return result

    @staticmethod
    def report_frame(result: EvaluationResult) -> pd.DataFrame:
        """評価結果の1行（BLEU は百分率）"""
        return pd.DataFrame([{
            "pair": result.pair,
            "direction": result.direction,
            "BLEU": round(result.bleu.score * 100, 2),
            "RIBES": round(result.ribes, 2),
            "METEOR": round(result.meteor, 2),
        }])

    @classmethod
    def append_csv(cls, result: EvaluationResult, csv_path: Path) -> Path:
        """pair,direction,BLEU,RIBES,METEOR 行を追記（新規・空ファイルならヘッダも）"""
        csv_path = Path(csv_path)
        header = not csv_path.is_file() or csv_path.stat().st_size == 0
        cls.report_frame(result).to_csv(
            csv_path, mode="a", header=header, index=False, float_format="%.2f", lineterminator="\n"
        )
        logger.info(f"Appended {result.pair} {result.direction} scores to {csv_path}")
        return csv_path

    @staticmethod
    def sentence_frame(result: EvaluationResult) -> pd.DataFrame:
        """文ごとの内訳"""
        return pd.DataFrame(
            [{"index": s.index, "BLEU": s.bleu, "RIBES": s.ribes, "METEOR": s.meteor} for s in result.sentences],
            columns=["index", "BLEU", "RIBES", "METEOR"],
        )
