"""
前処理（クリーニング・トゥルーケーシング）データモデル
"""

from dataclasses import dataclass, field
from typing import Dict, Optional

from .corpus import LanguageProfile


NATIVE_DIGITS = "native"
LATIN_DIGITS = "latin"

# 非標準句読点 → 標準句読点
DEFAULT_PUNCT_MAP: Dict[str, str] = {
    "“": '"',
    "”": '"',
    "„": '"',
    "‟": '"',
    "«": '"',
    "»": '"',
    "‘": "'",
    "’": "'",
    "‚": "'",
    "‛": "'",
    "‹": "'",
    "›": "'",
    "‐": "-",
    "‑": "-",
    "‒": "-",
    "–": "-",
    "—": "-",
    "―": "-",
    "−": "-",
    "…": "...",
    "॥": "।",
}


@dataclass(frozen=True)
class CleanConfig:
    """クリーニング設定"""
    profile: LanguageProfile
    normalize_digits_to: str = NATIVE_DIGITS          # native / latin
    punct_map: Dict[str, str] = field(default_factory=lambda: dict(DEFAULT_PUNCT_MAP))
    deaccent: bool = True                             # 英語側のみ有効

    @classmethod
    def for_profile(cls, profile: LanguageProfile, deaccent: bool = True,
                    normalize_digits_to: Optional[str] = None) -> "CleanConfig":
        """既定方針: インド諸語側は固有数字、英語側はASCII数字"""
        if normalize_digits_to is None:
            normalize_digits_to = LATIN_DIGITS if profile.latin_side else NATIVE_DIGITS
        return cls(profile=profile, normalize_digits_to=normalize_digits_to, deaccent=deaccent)

    def __hash__(self):
        return hash((self.profile, self.normalize_digits_to, tuple(sorted(self.punct_map.items())),
                     self.deaccent))


@dataclass
class TruecaseModel:
    """トゥルーケーシングモデル"""
    best_form: Dict[str, str] = field(default_factory=dict)  # 小文字化した語 → 最頻表記
    counts: Dict[str, int] = field(default_factory=dict)     # 表記 → 出現回数

    def __len__(self) -> int:
        return len(self.best_form)
