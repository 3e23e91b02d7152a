"""
実行マニフェスト データモデル
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List


@dataclass
class StageRecord:
    """1ステージの記録"""
    stage: str
    params: Dict[str, Any] = field(default_factory=dict)
    inputs: Dict[str, str] = field(default_factory=dict)    # ファイル名 → sha256
    outputs: Dict[str, str] = field(default_factory=dict)   # ファイル名 → sha256
    started_at: str = ""
    finished_at: str = ""


@dataclass
class RunManifest:
    """モデルディレクトリの実行記録"""
    src_lang: str
    tgt_lang: str
    stages: List[StageRecord] = field(default_factory=list)

    def add(self, record: StageRecord):
        self.stages = [s for s in self.stages if s.stage != record.stage] + [record]

    def stage(self, name: str) -> StageRecord:
        for record in self.stages:
            if record.stage == name:
                return record
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunManifest":
        return cls(
            src_lang=data["src_lang"],
            tgt_lang=data["tgt_lang"],
            stages=[StageRecord(**record) for record in data.get("stages", [])],
        )
