"""
スタックデコーダ サービス（距離ベースの並べ替えコスト付き）
"""

from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from ..exceptions import ValidationError
from ..models.decoding import (
    DecoderConfig,
    Derivation,
    DerivationStep,
    Features,
    FeatureWeights,
    Hypothesis,
    TranslationModels,
    TranslationResult,
)
from ..models.lm import BOS, EOS, LanguageModel
from ..models.phrase import Phrase, PhraseTable
from ..utils.prob_utils import ProbUtils

# 1つの翻訳候補: (目的言語フレーズ, 4素性の対数値, 未知語か)
Option = Tuple[Phrase, Tuple[float, float, float, float], bool]


def reordering_cost(prev_end: int, next_start: int) -> int:
    """d = |S - E - 1|（1始まりの位置）"""
    if prev_end < 0 or next_start < 1:
        raise ValidationError(f"invalid reordering positions E={prev_end}, S={next_start}")
    return abs(next_start - prev_end - 1)


def lm_increment(lm: LanguageModel, state: Tuple[str, ...], words: Sequence[str]) -> Tuple[float, Tuple[str, ...]]:
    """語列を出力したときの言語モデル対数確率と新しい文脈"""
    width = lm.order - 1
    history = list(state)
    total = 0.0
    for word in words:
        p = lm.prob(word, history[-width:] if width else ())
        total += ProbUtils.safe_log(p)
        history.append(word)
    return total, (tuple(history[-width:]) if width else ())


class DecoderService:
    """スタックデコーダサービス"""

    @staticmethod
    def translation_options(
        src: Sequence[str], table: PhraseTable, config: DecoderConfig
    ) -> Dict[Tuple[int, int], List[Option]]:
        """原言語スパン (0始まり両端含む) ごとの訳候補"""
        options: Dict[Tuple[int, int], List[Option]] = {}
        n = len(src)
        for start in range(n):
            for end in range(start, min(n, start + config.max_phrase_len)):
                phrase = tuple(src[start:end + 1])
                candidates = [(tgt, scores.logs(), False) for tgt, scores in table.lookup(phrase)]
                if not candidates and start == end:
                    # 未知語はそのままコピー
                    oov = config.oov_log_score
                    candidates = [(phrase, (oov, oov, oov, oov), True)]
                if candidates:
                    options[(start, end)] = candidates
        return options

    def decode(
        self,
        src: Sequence[str],
        models: TranslationModels,
        weights: FeatureWeights,
        config: Optional[DecoderConfig] = None,
    ) -> TranslationResult:
        """最良の訳とその導出を返す"""
        config = config or models.config
        src = tuple(src)
        if not src:
            derivation = Derivation(src_tokens=src)
            derivation.end_lm, _ = lm_increment(models.lm, (BOS,) * (models.lm.order - 1), [EOS])
            derivation.score = weights.w_lm * derivation.end_lm
            return TranslationResult(tokens=[], derivation=derivation)

        best = self._search(src, models, weights, config)
        fallback = False
        if best is None:
            logger.warning(
                f"No complete hypothesis within distortion limit {config.distortion_limit}; "
                "decoding again without the limit"
            )
            best = self._search(src, models, weights, config.unlimited())
            fallback = True

        hypothesis, end_lm, final_score = best
        derivation = Derivation(
            src_tokens=src, steps=hypothesis.steps(), end_lm=end_lm, score=final_score
        )
        logger.debug(f"Decoded {len(src)} tokens with score {final_score:.6f}")
        return TranslationResult(tokens=list(hypothesis.output), derivation=derivation, fallback=fallback)

    def _search(
        self,
        src: Tuple[str, ...],
        models: TranslationModels,
        weights: FeatureWeights,
        config: DecoderConfig,
    ) -> Optional[Tuple[Hypothesis, float, float]]:
        n = len(src)
        lm = models.lm
        options = self.translation_options(src, models.phrase_table, config)
        full = (1 << n) - 1

        stacks: List[Dict[Tuple, Hypothesis]] = [dict() for _ in range(n + 1)]
        initial = Hypothesis(
            coverage=0, last_end=0, output=(), score=0.0, lm_state=(BOS,) * (lm.order - 1)
        )
        stacks[0][initial.recombination_key()] = initial

        for covered in range(n):
            beam = sorted(stacks[covered].values(), key=Hypothesis.sort_key)[:config.stack_size]
            for hypothesis in beam:
                self._expand(hypothesis, src, options, lm, weights, config, stacks)

        finals = []
        for hypothesis in stacks[n].values():
            if hypothesis.coverage != full:
                continue
            end_lm, _ = lm_increment(lm, hypothesis.lm_state, [EOS])
            finals.append((hypothesis.score + weights.w_lm * end_lm, hypothesis, end_lm))
        if not finals:
            return None

        score, hypothesis, end_lm = min(finals, key=lambda item: (-item[0], item[1].output))
        return hypothesis, end_lm, score

    @staticmethod
    def _expand(
        hypothesis: Hypothesis,
        src: Tuple[str, ...],
        options: Dict[Tuple[int, int], List[Option]],
        lm: LanguageModel,
        weights: FeatureWeights,
        config: DecoderConfig,
        stacks: List[Dict[Tuple, Hypothesis]],
    ):
        n = len(src)
        for start in range(n):
            if hypothesis.coverage >> start & 1:
                continue
            distortion = reordering_cost(hypothesis.last_end, start + 1)
            if config.distortion_limit is not None and distortion > config.distortion_limit:
                continue
            for end in range(start, n):
                if hypothesis.coverage >> end & 1:
                    break
                span_options = options.get((start, end))
                if not span_options:
                    continue
                span_mask = ((1 << (end + 1)) - 1) ^ ((1 << start) - 1)
                for tgt, logs, oov in span_options:
                    lm_score, lm_state = lm_increment(lm, hypothesis.lm_state, tgt)
                    features = Features(lm_score, *logs, -float(distortion), -float(len(tgt)))
                    step = DerivationStep(src_span=(start, end), tgt=tgt, features=features, oov=oov)
                    new = Hypothesis(
                        coverage=hypothesis.coverage | span_mask,
                        last_end=end + 1,
                        output=hypothesis.output + tgt,
                        score=hypothesis.score + features.weighted(weights),
                        lm_state=lm_state,
                        back=hypothesis,
                        step=step,
                    )
                    stack = stacks[new.covered]
                    key = new.recombination_key()
                    current = stack.get(key)
                    if current is None or new.sort_key()[:2] < current.sort_key()[:2]:
                        stack[key] = new

    @staticmethod
    def score_derivation(
        derivation: Derivation,
        models: TranslationModels,
        weights: FeatureWeights,
    ) -> float:
        """導出のスコアを最初から再計算"""
        n = len(derivation.src_tokens)
        covered = [False] * n
        for step in derivation.steps:
            start, end = step.src_span
            if not 0 <= start <= end < n:
                raise ValidationError(f"span [{start}..{end}] outside a {n}-token source")
            for position in range(start, end + 1):
                if covered[position]:
                    raise ValidationError(f"source position {position} covered twice")
                covered[position] = True
        if not all(covered):
            missing = [position for position, flag in enumerate(covered) if not flag]
            raise ValidationError(f"source positions {missing} not covered")

        config = models.config
        total_phrase = [0.0, 0.0, 0.0, 0.0]
        distortion = 0
        last_end = 0
        for step in derivation.steps:
            start, end = step.src_span
            src_phrase = tuple(derivation.src_tokens[start:end + 1])
            logs = None
            for tgt, scores in models.phrase_table.lookup(src_phrase):
                if tgt == step.tgt:
                    logs = scores.logs()
                    break
            if logs is None:
                if start != end or src_phrase != step.tgt or models.phrase_table.lookup(src_phrase):
                    raise ValidationError(f"phrase {src_phrase} -> {step.tgt} is not in the phrase table")
                logs = (config.oov_log_score,) * 4
            total_phrase = [a + b for a, b in zip(total_phrase, logs)]
            distortion += reordering_cost(last_end, start + 1)
            last_end = end + 1

        output = derivation.output
        features = Features(
            models.lm.logprob_sentence(output),
            *total_phrase,
            -float(distortion),
            -float(len(output)),
        )
        return features.weighted(weights)

    def translate_corpus(
        self, sentences: Sequence[Sequence[str]], models: TranslationModels, weights: FeatureWeights
    ) -> List[TranslationResult]:
        results = [self.decode(tokens, models, weights) for tokens in sentences]
        logger.info(f"Decoded {len(results)} sentences")
        return results
