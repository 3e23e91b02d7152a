"""
言語プロファイル レジストリ（15インド諸語 + 英語）
"""

import json
from pathlib import Path
from typing import Dict, Optional

from loguru import logger

from ..exceptions import DataError, ValidationError
from ..models.corpus import LanguageProfile, LTR, RTL


# Unicodeブロック
DEVANAGARI = (0x0900, 0x097F)
BENGALI = (0x0980, 0x09FF)
GURMUKHI = (0x0A00, 0x0A7F)
GUJARATI = (0x0A80, 0x0AFF)
ORIYA = (0x0B00, 0x0B7F)
TAMIL = (0x0B80, 0x0BFF)
TELUGU = (0x0C00, 0x0C7F)
KANNADA = (0x0C80, 0x0CFF)
MALAYALAM = (0x0D00, 0x0D7F)
SINHALA = (0x0D80, 0x0DFF)
ARABIC = (0x0600, 0x06FF)
ARABIC_SUPPLEMENT = (0x0750, 0x077F)
ARABIC_PRESENTATION_A = (0xFB50, 0xFDFF)
ARABIC_PRESENTATION_B = (0xFE70, 0xFEFF)
PERSO_ARABIC = (ARABIC, ARABIC_SUPPLEMENT, ARABIC_PRESENTATION_A, ARABIC_PRESENTATION_B)

# 英語側: 英字・ラテン拡張・結合ダイアクリティカルマーク
LATIN = ((0x0041, 0x005A), (0x0061, 0x007A), (0x00C0, 0x024F), (0x0300, 0x036F))


def _profile(code, name, script, blocks, digit_zero, direction=LTR, family="Indo-European",
             word_order="SOV", flores_code="", latin_side=False) -> LanguageProfile:
    return LanguageProfile(
        code=code,
        script_blocks=tuple(sorted(blocks)),
        digit_zero=digit_zero,
        direction=direction,
        latin_side=latin_side,
        name=name,
        script=script,
        word_order=word_order,
        family=family,
        flores_code=flores_code,
    )


BUILTIN_PROFILES: Dict[str, LanguageProfile] = {
    p.code: p
    for p in (
        _profile("as", "Assamese", "Bengali", [BENGALI], 0x09E6, flores_code="asm_Beng"),
        _profile("ml", "Malayalam", "Malayalam", [MALAYALAM], 0x0D66, family="Dravidian",
                 flores_code="mal_Mlym"),
        _profile("bn", "Bengali", "Bengali", [BENGALI], 0x09E6, flores_code="ben_Beng"),
        _profile("mr", "Marathi", "Devanagari", [DEVANAGARI], 0x0966, flores_code="mar_Deva"),
        _profile("gu", "Gujarati", "Gujarati", [GUJARATI], 0x0AE6, flores_code="guj_Gujr"),
        _profile("kn", "Kannada", "Kannada", [KANNADA], 0x0CE6, family="Dravidian",
                 flores_code="kan_Knda"),
        _profile("hi", "Hindi", "Devanagari", [DEVANAGARI], 0x0966, flores_code="hin_Deva"),
        _profile("or", "Oriya", "Oriya", [ORIYA], 0x0B66, flores_code="ory_Orya"),
        # Gurmukhi側の記述方向・数字を採用し、Shahmukhi文字も許可
        _profile("pa", "Punjabi", "Perso-Arabic, Gurmukhi", [*PERSO_ARABIC, GURMUKHI], 0x0A66,
                 flores_code="pan_Guru"),
        _profile("te", "Telugu", "Telugu", [TELUGU], 0x0C66, family="Dravidian",
                 flores_code="tel_Telu"),
        # Perso-Arabic側の記述方向・数字を採用し、Devanagari文字も許可
        _profile("sd", "Sindhi", "Devanagari, Perso-Arabic", [*PERSO_ARABIC, DEVANAGARI], 0x0660,
                 direction=RTL, flores_code="snd_Arab"),
        # シンハラ語は日常的にASCII数字を使う
        _profile("si", "Sinhala", "Sinhala", [SINHALA], 0x0030, flores_code="sin_Sinh"),
        _profile("ne", "Nepali", "Devanagari", [DEVANAGARI], 0x0966, flores_code="npi_Deva"),
        _profile("ta", "Tamil", "Tamil", [TAMIL], 0x0BE6, family="Dravidian",
                 flores_code="tam_Taml"),
        _profile("ur", "Urdu", "Urdu", list(PERSO_ARABIC), 0x06F0, direction=RTL,
                 flores_code="urd_Arab"),
        _profile("en", "English", "Roman", list(LATIN), 0x0030, word_order="SVO",
                 flores_code="eng_Latn", latin_side=True),
    )
}


def load_profile_file(path: Path) -> Dict[str, LanguageProfile]:
    """JSONプロファイルファイルの読み込み

    形式: プロファイルオブジェクトのリスト。script_blocksは[[start, end], ...]、
    コードポイントは整数または"0x0900"形式の文字列。
    """
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"profile file not found: {path}")
    try:
        entries = json.loads(path.read_text(encoding="utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise DataError(f"profile file {path} is not valid UTF-8 JSON: {e}")

    def codepoint(value) -> int:
        return int(value, 16) if isinstance(value, str) else int(value)

    profiles = {}
    for entry in entries:
        try:
            profile = LanguageProfile(
                code=entry["code"],
                script_blocks=tuple(
                    sorted((codepoint(start), codepoint(end)) for start, end in entry["script_blocks"])
                ),
                digit_zero=codepoint(entry["digit_zero"]),
                direction=entry.get("direction", LTR),
                latin_side=bool(entry.get("latin_side", False)),
                name=entry.get("name", ""),
                script=entry.get("script", ""),
                word_order=entry.get("word_order", "SOV"),
                family=entry.get("family", ""),
                flores_code=entry.get("flores_code", ""),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DataError(f"invalid profile entry in {path}: {e}")
        profiles[profile.code] = profile

    logger.info(f"Loaded {len(profiles)} language profiles from {path}")
    return profiles


def resolve_profile(code: str, profile_file: Optional[Path] = None) -> LanguageProfile:
    """言語タグからプロファイルを解決（ファイル指定があれば優先）"""
    if profile_file:
        overrides = load_profile_file(profile_file)
        if code in overrides:
            return overrides[code]
    if code in BUILTIN_PROFILES:
        return BUILTIN_PROFILES[code]
    raise ValidationError(f"unknown language code {code!r}; supply a profile file")
