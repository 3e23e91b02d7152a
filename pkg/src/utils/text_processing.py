"""
テキスト処理ユーティリティ（クリーニング・トークン化・後処理）
"""

import string
import unicodedata
from typing import List

from ..models.corpus import LanguageProfile
from ..models.preprocess import CleanConfig, LATIN_DIGITS


# 共通句読点（ASCII記号 + ダンダ・アラビア文字句読点）
COMMON_PUNCT = frozenset(string.punctuation) | frozenset("।॥،؛؟۔")

# 語頭から切り離す開き記号
OPENING = frozenset("([{\"'`")
# 語末から切り離す閉じ・付着記号
CLOSING = frozenset(",.!?।؟;:)]}۔،؛\"'`")

# 詳細化で前の語に付ける記号（引用符は含めない）
ATTACH_LEFT = frozenset(",.!?।؟;:)]}۔،؛")
ATTACH_RIGHT = frozenset("([{")

REDUNDANT_PUNCT = frozenset({'"', "'", "`", ",", "،"})

# インド諸語の結合に必要な書式文字（ZWNJ / ZWJ）
JOINERS = frozenset({chr(0x200C), chr(0x200D)})


class TextProcessor:
    """テキスト処理クラス"""

    @staticmethod
    def is_allowed(char: str, config: CleanConfig) -> bool:
        """クリーニング後に残してよい文字か"""
        if char == " " or char in COMMON_PUNCT:
            return True
        if char in config.punct_map:
            return True
        if unicodedata.decimal(char, None) is not None:
            return True
        if char in JOINERS and not config.profile.latin_side:
            return True
        return config.profile.in_script(char)

    @staticmethod
    def clean_line(line: str, config: CleanConfig) -> str:
        """1行のクリーニング

        制御・不可視文字の除去 → 文字体系外の文字の除去 → 句読点の標準化
        → （英語側のみ）アクセント除去 → 数字の統一 → 空白の正規化
        """
        if not line:
            return ""

        chars = []
        for char in line:
            if char.isspace():
                chars.append(" ")
                continue
            if unicodedata.category(char).startswith("C") and char not in JOINERS:
                continue
            chars.append(char)

        chars = [c for c in chars if TextProcessor.is_allowed(c, config)]
        text = "".join(config.punct_map.get(c, c) for c in chars)

        if config.deaccent and config.profile.latin_side:
            text = TextProcessor.deaccent(text)

        text = TextProcessor.normalize_digits(text, config)
        return " ".join(text.split())

    @staticmethod
    def deaccent(text: str) -> str:
        """正準分解して結合記号（Mn）を除去"""
        decomposed = unicodedata.normalize("NFD", text)
        return "".join(c for c in decomposed if unicodedata.category(c) != "Mn")

    @staticmethod
    def normalize_digits(text: str, config: CleanConfig) -> str:
        """どの文字体系の数字も指定の文字体系へ写像（数字の並びのオフセットで変換）"""
        zero = ord("0") if config.normalize_digits_to == LATIN_DIGITS else config.profile.digit_zero
        out = []
        for char in text:
            value = unicodedata.decimal(char, None)
            if value is not None:
                out.append(chr(zero + value))
            else:
                out.append(char)
        return "".join(out)

    @staticmethod
    def tokenize(line: str, profile: LanguageProfile) -> List[str]:
        """空白で分割し、語頭・語末の句読点を独立トークンにする"""
        tokens: List[str] = []
        for chunk in line.split():
            start, end = 0, len(chunk)
            while start < end and chunk[start] in OPENING:
                tokens.append(chunk[start])
                start += 1

            trailing = []
            while end > start and chunk[end - 1] in CLOSING:
                trailing.append(chunk[end - 1])
                end -= 1

            if start < end:
                tokens.append(chunk[start:end])
            tokens.extend(reversed(trailing))
        return tokens

    @staticmethod
    def detokenize(tokens: List[str], profile: LanguageProfile) -> str:
        """空白で連結し、閉じ記号の前・開き括弧の後の空白を除去"""
        if not tokens:
            return ""
        parts = [tokens[0]]
        for previous, token in zip(tokens, tokens[1:]):
            glue = all(c in ATTACH_LEFT for c in token) or all(c in ATTACH_RIGHT for c in previous)
            parts.append(token if glue else " " + token)
        return "".join(parts)

    @staticmethod
    def strip_redundant_punct(tokens: List[str]) -> List[str]:
        """冗長な句読点（引用符・アポストロフィ・カンマ）の除去"""
        return [token for token in tokens if token not in REDUNDANT_PUNCT]

    @staticmethod
    def is_latin_word(token: str) -> bool:
        """ラテン文字を含み、それ以外の文字体系の英字を含まないトークンか"""
        letters = [c for c in token if c.isalpha()]
        return bool(letters) and all(unicodedata.name(c, "").startswith("LATIN") for c in letters)

    @staticmethod
    def has_alpha(token: str) -> bool:
        return any(c.isalpha() for c in token)
