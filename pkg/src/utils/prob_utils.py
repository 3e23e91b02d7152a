"""
確率計算ユーティリティ
"""

import math
from collections import defaultdict
from typing import Callable, Dict, Hashable, Iterable, List, Tuple, TypeVar

import numpy as np

K = TypeVar("K", bound=Hashable)


class ProbUtils:
    """確率計算ユーティリティクラス"""

    @staticmethod
    def safe_log(value: float) -> float:
        """0以下は -inf"""
        return math.log(value) if value > 0.0 else -math.inf

    @staticmethod
    def row_posteriors(scores: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """行ごとに正規化した事後確率と行和を返す"""
        totals = scores.sum(axis=1)
        safe = np.where(totals > 0.0, totals, 1.0)
        return scores / safe[:, None], totals

    @staticmethod
    def exact_sums(contributions: Dict[K, List[float]]) -> Dict[K, float]:
        """期待値の寄与を正確な和で集計（加算順に依存しない）"""
        return {key: math.fsum(values) for key, values in contributions.items()}

    @staticmethod
    def normalize_grouped(
        counts: Dict[K, float], group_of: Callable[[K], Hashable]
    ) -> Dict[K, float]:
        """グループごとに和が1になるよう正規化"""
        members: Dict[Hashable, List[K]] = defaultdict(list)
        for key in counts:
            members[group_of(key)].append(key)
        result: Dict[K, float] = {}
        for keys in members.values():
            total = math.fsum(counts[key] for key in keys)
            for key in keys:
                result[key] = counts[key] / total
        return result

    @staticmethod
    def rows_normalized(
        table: Dict[K, float], group_of: Callable[[K], Hashable], tolerance: float = 1e-9
    ) -> bool:
        """全グループの和が 1 ± tolerance か"""
        sums: Dict[Hashable, List[float]] = defaultdict(list)
        for key, value in table.items():
            sums[group_of(key)].append(value)
        return all(abs(math.fsum(values) - 1.0) <= tolerance for values in sums.values())

    @staticmethod
    def mean(values: Iterable[float]) -> float:
        values = list(values)
        return math.fsum(values) / len(values) if values else 0.0
