"""
テスト共通フィクスチャ（小規模コーパス・合成言語・モデルディレクトリ）
"""

import random
from pathlib import Path
from typing import List, Tuple

import pytest

from src.config.language_profiles import BUILTIN_PROFILES
from src.models.corpus import ParallelCorpus, SentencePair
from src.models.decoding import DecoderConfig, TranslationModels
from src.services.alignment_service import AlignmentService
from src.services.language_model_service import LanguageModelService
from src.services.phrase_service import PhraseService

# 合成言語: 原言語は Devanagari 2文字語、語順 S A O V ।（疑問文は ?）
#           目的言語は ASCII 語、語順 S V A O .（疑問文は ?）
QUESTION_RATE = 0.25
CONSONANTS = [chr(c) for c in range(0x0915, 0x0939)]
VOWEL_SIGNS = [chr(c) for c in (0x093E, 0x093F, 0x0940, 0x0941, 0x0942, 0x0947, 0x0948, 0x094B, 0x094C)]

LEXICON_SIZES = {"subject": 10, "adjective": 10, "object": 15, "verb": 15}
TARGET_PREFIX = {"subject": "sub", "adjective": "adj", "object": "obj", "verb": "verb"}
LETTERS = "abcdefghijklmno"


def _source_words(count: int) -> List[str]:
    words = []
    for consonant in CONSONANTS:
        for sign in VOWEL_SIGNS:
            words.append(consonant + sign)
            if len(words) == count:
                return words
    return words


def synthetic_lexicon():
    """品詞ごとの (原言語語, 目的言語語) 対応（合計50語）"""
    sources = iter(_source_words(sum(LEXICON_SIZES.values())))
    lexicon = {}
    for role, size in LEXICON_SIZES.items():
        lexicon[role] = [(next(sources), f"{TARGET_PREFIX[role]}{LETTERS[k]}") for k in range(size)]
    return lexicon


def synthetic_pairs(count: int, seed: int) -> List[Tuple[str, str]]:
    """S A O V । → S' V' A' O' . の文対を生成（一部は疑問文）"""
    lexicon = synthetic_lexicon()
    rng = random.Random(seed)
    pairs = []
    for _ in range(count):
        s, a, o, v = (rng.choice(lexicon[role]) for role in ("subject", "adjective", "object", "verb"))
        src_end, tgt_end = ("?", "?") if rng.random() < QUESTION_RATE else ("।", ".")
        pairs.append((
            f"{s[0]} {a[0]} {o[0]} {v[0]} {src_end}",
            f"{s[1]} {v[1]} {a[1]} {o[1]} {tgt_end}",
        ))
    return pairs


def write_pairs(prefix: Path, pairs: List[Tuple[str, str]], src: str = "hi", tgt: str = "en"):
    prefix.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{prefix}.{src}").write_text("".join(s + "\n" for s, _ in pairs), encoding="utf-8")
    Path(f"{prefix}.{tgt}").write_text("".join(t + "\n" for _, t in pairs), encoding="utf-8")


@pytest.fixture
def hi_profile():
    return BUILTIN_PROFILES["hi"]


@pytest.fixture
def en_profile():
    return BUILTIN_PROFILES["en"]


@pytest.fixture
def toy_corpus(hi_profile, en_profile):
    """トークン化済みの小さな対訳コーパス"""
    lines = [
        ("a b c", "x y z"),
        ("a b", "x y"),
        ("b c", "y z"),
        ("a", "x"),
    ]
    return ParallelCorpus(
        pairs=[SentencePair(source=s, target=t, line_no=k) for k, (s, t) in enumerate(lines, start=1)],
        src_profile=en_profile,
        tgt_profile=en_profile,
    )


@pytest.fixture(scope="session")
def synthetic_models():
    """合成言語の学習済みモデル（メモリ上、hi → en）"""
    pairs = [(s.split(), t.split()) for s, t in synthetic_pairs(300, seed=7)]
    alignment_service = AlignmentService()
    forward = alignment_service.train_direction(pairs, 5, 5)
    reverse = alignment_service.train_direction([(t, s) for s, t in pairs], 5, 5)
    alignments = alignment_service.align_corpus(pairs, forward, reverse)
    table = PhraseService().build_phrase_table(pairs, alignments, forward.lexical, reverse.lexical)
    lm_service = LanguageModelService()
    lm = lm_service.to_arpa(lm_service.train([t for _, t in pairs], order=3))
    return TranslationModels(phrase_table=table, lm=lm, config=DecoderConfig())


@pytest.fixture
def synthetic_dev():
    """合成言語の開発セット（トークン列）"""
    return [(s.split(), t.split()) for s, t in synthetic_pairs(10, seed=99)]


@pytest.fixture
def synthetic_files(tmp_path):
    """学習500文・テスト50文のファイル一式と設定ファイル"""
    write_pairs(tmp_path / "data" / "train", synthetic_pairs(500, seed=1))
    write_pairs(tmp_path / "data" / "test", synthetic_pairs(50, seed=2))
    write_pairs(tmp_path / "data" / "dev", synthetic_pairs(10, seed=3))
    config = tmp_path / "hi-en.json"
    config.write_text(
        "{\n"
        '  "src_lang": "hi",\n'
        '  "tgt_lang": "en",\n'
        f'  "corpus_prefix": "{(tmp_path / "data" / "train").as_posix()}",\n'
        f'  "dev_prefix": "{(tmp_path / "data" / "dev").as_posix()}",\n'
        f'  "test_prefix": "{(tmp_path / "data" / "test").as_posix()}",\n'
        f'  "model_dir": "{(tmp_path / "model").as_posix()}",\n'
        '  "tune_passes": 1\n'
        "}\n",
        encoding="utf-8",
    )
    return tmp_path
