"""
モデルディレクトリ（成果物の配置・ダイジェスト・マニフェスト）
"""

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Iterable, List

from loguru import logger

from ..exceptions import DataError, ValidationError
from ..models.manifest import RunManifest, StageRecord

MANIFEST = "manifest.json"
PHRASE_TABLE = "phrase-table"
WEIGHTS = "weights"
TUNE_REPORT = "tune-report"
LEX_S2T = "lex.s2t"
LEX_T2S = "lex.t2s"
IBM2_S2T = "ibm2.s2t"
IBM2_T2S = "ibm2.t2s"


def sha256_file(path: Path) -> str:
    """ファイル内容のsha256"""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class ModelDirectory:
    """1方向の翻訳モデルを保持するディレクトリ"""

    def __init__(self, root: Path, src_lang: str, tgt_lang: str):
        self.root = Path(root)
        self.src_lang = src_lang
        self.tgt_lang = tgt_lang

    def init(self):
        """ディレクトリの作成"""
        self.root.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        return self.root / name

    def truecase_path(self, lang: str) -> Path:
        return self.root / f"truecase.{lang}"

    @property
    def lm_path(self) -> Path:
        return self.root / f"lm.{self.tgt_lang}.arpa"

    def alignment_path(self, heuristic: str) -> Path:
        return self.root / f"aligned.{heuristic}"

    def training_artifacts(self, heuristic: str) -> List[Path]:
        """train が出力する成果物"""
        return [
            self.truecase_path(self.src_lang),
            self.truecase_path(self.tgt_lang),
            self.lm_path,
            self.path(LEX_S2T),
            self.path(LEX_T2S),
            self.path(IBM2_S2T),
            self.path(IBM2_T2S),
            self.alignment_path(heuristic),
            self.path(PHRASE_TABLE),
        ]

    def require(self, paths: Iterable[Path]):
        """翻訳・チューニングに必要な成果物が揃っているか"""
        if not self.root.is_dir():
            raise ValidationError(f"model directory not found: {self.root}")
        missing = [str(p) for p in paths if not p.is_file()]
        if missing:
            raise DataError(f"incomplete model directory {self.root}; missing {', '.join(missing)}")

    @staticmethod
    def digests(paths: Iterable[Path]) -> Dict[str, str]:
        return {Path(p).name: sha256_file(Path(p)) for p in paths}

    # ------------------------------------------------------------------
    # マニフェスト
    # ------------------------------------------------------------------

    def load_manifest(self) -> RunManifest:
        path = self.path(MANIFEST)
        if not path.is_file():
            return RunManifest(src_lang=self.src_lang, tgt_lang=self.tgt_lang)
        try:
            return RunManifest.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise DataError(f"unreadable manifest {path}: {e}")

    def record_stage(
        self,
        stage: str,
        params: Dict,
        inputs: Iterable[Path],
        outputs: Iterable[Path],
        started_at: str,
    ) -> StageRecord:
        """ステージの入出力ダイジェストをマニフェストに追記"""
        record = StageRecord(
            stage=stage,
            params=params,
            inputs=self.digests(inputs),
            outputs=self.digests(outputs),
            started_at=started_at,
            finished_at=utc_timestamp(),
        )
        manifest = self.load_manifest()
        manifest.add(record)
        self.path(MANIFEST).write_text(
            json.dumps(manifest.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        logger.info(f"Recorded stage {stage} in {self.path(MANIFEST)}")
        return record
