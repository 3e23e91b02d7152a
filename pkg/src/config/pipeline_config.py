"""
パイプライン設定（JSON設定ファイル + CLI上書き）
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

import pydantic
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..exceptions import DataError, ValidationError
from ..models.corpus import LanguageProfile
from ..models.decoding import DecoderConfig
from ..models.evaluation import RibesConfig
from .language_profiles import resolve_profile
from .settings import settings

# コマンドごとに存在が必要なパス
REQUIRED_PATHS = {
    "clean": ("corpus",),
    "stats": ("corpus",),
    "train": ("corpus",),
    "tune": ("dev",),
    "translate": (),
    "evaluate": (),
    "show-config": (),
}

# 歪み制限を無制限にする値（CLIとJSONの両方で使える）
UNLIMITED_DISTORTION = ("none", "unlimited", "-1")


class PipelineConfig(BaseModel):
    """パイプライン設定"""

    model_config = ConfigDict(extra="forbid", protected_namespaces=())

    # 言語・パス
    src_lang: Optional[str] = None
    tgt_lang: Optional[str] = None
    corpus_prefix: Optional[str] = None      # <prefix>.<lang>
    dev_prefix: Optional[str] = None
    test_prefix: Optional[str] = None
    model_dir: str = Field(default_factory=lambda: settings.model_dir)
    profile_file: Optional[str] = None
    flores_dir: Optional[str] = None

    # コーパスフィルタ
    max_len: int = Field(80, ge=1)
    max_ratio: float = Field(9.0, ge=1.0)

    # 言語モデル
    lm_order: int = Field(3, ge=1)
    lm_smoothing: Literal["none", "witten-bell"] = "witten-bell"

    # アライメント・フレーズ
    em_iterations: int = Field(5, ge=1)
    symmetrization: Literal[
        "intersection", "union", "grow-diag", "grow-diag-final", "grow-diag-final-and"
    ] = "grow-diag-final-and"
    max_phrase_len: int = Field(7, ge=1)
    unaligned_expansion: bool = True

    # デコーダ
    stack_size: int = Field(100, ge=1)
    distortion_limit: Optional[int] = Field(6, ge=0)
    oov_log_score: float = -10.0
    future_cost: bool = False

    # 評価・チューニング
    ribes_alpha: float = Field(0.25, ge=0.0, le=1.0)
    ribes_beta: float = Field(0.10, ge=0.0, le=1.0)
    tune_metric: Literal["bleu", "ribes", "meteor"] = "bleu"
    tune_passes: int = Field(3, ge=1)

    deterministic: bool = True

    @field_validator("distortion_limit", mode="before")
    @classmethod
    def unlimited_distortion(cls, value):
        """none・unlimited・-1 は無制限 (None)"""
        if value is not None and str(value).strip().lower() in UNLIMITED_DISTORTION:
            return None
        return value

    @classmethod
    def load(cls, path: Optional[Path] = None, overrides: Optional[Dict[str, Any]] = None) -> "PipelineConfig":
        """設定ファイルを読み込み、Noneでない上書き値を適用"""
        data: Dict[str, Any] = {}
        if path is not None:
            path = Path(path)
            if not path.is_file():
                raise ValidationError(f"config file not found: {path}")
            try:
                data = json.loads(path.read_bytes().decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as e:
                raise ValidationError(f"config file {path} is not valid UTF-8 JSON: {e}")
            if not isinstance(data, dict):
                raise ValidationError(f"config file {path} must hold a JSON object")
        for key, value in (overrides or {}).items():
            if value is not None:
                data[key] = value
        try:
            return cls(**data)
        except pydantic.ValidationError as e:
            raise ValidationError(f"invalid configuration: {e}")

    # ------------------------------------------------------------------
    # 派生値
    # ------------------------------------------------------------------

    @staticmethod
    def side_paths(prefix: Optional[str], src_lang: str, tgt_lang: str) -> Tuple[Path, Path]:
        return Path(f"{prefix}.{src_lang}"), Path(f"{prefix}.{tgt_lang}")

    def corpus_paths(self) -> Tuple[Path, Path]:
        return self.side_paths(self.corpus_prefix, self.src_lang, self.tgt_lang)

    def dev_paths(self) -> Tuple[Path, Path]:
        return self.side_paths(self.dev_prefix, self.src_lang, self.tgt_lang)

    def test_paths(self) -> Tuple[Path, Path]:
        return self.side_paths(self.test_prefix, self.src_lang, self.tgt_lang)

    def profiles(self) -> Tuple[LanguageProfile, LanguageProfile]:
        profile_file = Path(self.profile_file) if self.profile_file else None
        return (
            resolve_profile(self.src_lang, profile_file),
            resolve_profile(self.tgt_lang, profile_file),
        )

    def decoder_config(self) -> DecoderConfig:
        return DecoderConfig(
            stack_size=self.stack_size,
            distortion_limit=self.distortion_limit,
            max_phrase_len=self.max_phrase_len,
            oov_log_score=self.oov_log_score,
            future_cost=self.future_cost,
        )

    def ribes_config(self) -> RibesConfig:
        return RibesConfig(alpha=self.ribes_alpha, beta=self.ribes_beta)

    def stage_params(self, *names: str) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in names}

    # ------------------------------------------------------------------
    # 検証
    # ------------------------------------------------------------------

    def validate(self, command: str = "") -> Tuple[bool, List[str]]:
        """設定の検証（コマンド開始時に必要なパス・言語タグ）"""
        errors = []
        if not self.deterministic:
            errors.append("deterministic must stay true")
        if self.future_cost:
            errors.append("future_cost is a placeholder and must stay false")

        if command != "show-config":
            if not self.src_lang or not self.tgt_lang:
                errors.append("src_lang and tgt_lang are required")
            else:
                try:
                    self.profiles()
                except (ValidationError, DataError) as e:
                    errors.append(str(e))

        for kind in REQUIRED_PATHS.get(command, ()):
            prefix = getattr(self, f"{kind}_prefix")
            if not prefix:
                errors.append(f"{kind}_prefix is required for {command}")
            elif self.src_lang and self.tgt_lang:
                for path in self.side_paths(prefix, self.src_lang, self.tgt_lang):
                    if not path.is_file():
                        errors.append(f"file not found: {path}")

        return len(errors) == 0, errors

    def get_status(self, command: str = "") -> dict:
        """現在の設定状況を取得"""
        is_valid, errors = self.validate(command)
        return {
            "valid": is_valid,
            "errors": errors,
            "direction": f"{self.src_lang}-{self.tgt_lang}",
            "model_dir": self.model_dir,
            "corpus": self.corpus_prefix,
            "dev": self.dev_prefix,
            "test": self.test_prefix,
        }

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), indent=2, sort_keys=True, ensure_ascii=False)
