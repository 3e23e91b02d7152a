"""
トゥルーケーシング サービス
"""

from collections import Counter
from typing import Dict, List, Optional, Sequence

from loguru import logger

from ..models.preprocess import TruecaseModel
from ..utils.text_processing import TextProcessor


class TruecaseService:
    """トゥルーケーシングサービス"""

    @staticmethod
    def _initial_index(tokens: Sequence[str]) -> Optional[int]:
        """文頭語（最初の英字を含むトークン）の位置"""
        for index, token in enumerate(tokens):
            if TextProcessor.has_alpha(token):
                return index
        return None

    @staticmethod
    def _group(counter: Counter) -> Dict[str, Dict[str, int]]:
        grouped: Dict[str, Dict[str, int]] = {}
        for surface, count in counter.items():
            grouped.setdefault(surface.lower(), {})[surface] = count
        return grouped

    def train(self, sentences: Sequence[Sequence[str]]) -> TruecaseModel:
        """文頭以外の出現から各語の最頻表記を学習"""
        inner: Counter = Counter()
        initial: Counter = Counter()
        for tokens in sentences:
            first = self._initial_index(tokens)
            for index, token in enumerate(tokens):
                if not TextProcessor.is_latin_word(token):
                    continue
                if index == first:
                    initial[token] += 1
                else:
                    inner[token] += 1

        inner_forms = self._group(inner)
        initial_forms = self._group(initial)

        best_form = {}
        counts = {}
        for key in sorted(set(inner_forms) | set(initial_forms)):
            # 文頭でのみ観測された語は文頭の出現で数える
            forms = inner_forms.get(key) or initial_forms[key]
            best_form[key] = min(forms, key=lambda surface: (-forms[surface], surface))
            counts.update(forms)

        logger.info(f"Trained truecaser on {len(sentences)} sentences: {len(best_form)} word types")
        return TruecaseModel(best_form=best_form, counts=counts)

    def truecase(self, tokens: Sequence[str], model: TruecaseModel) -> List[str]:
        """文頭語を最頻表記に置き換える（ラテン文字のみ）"""
        tokens = list(tokens)
        first = self._initial_index(tokens)
        if first is None or not TextProcessor.is_latin_word(tokens[first]):
            return tokens
        best = model.best_form.get(tokens[first].lower())
        if best is not None:
            tokens[first] = best
        return tokens
