"""
行単位テキストファイル リポジトリ
"""

from pathlib import Path
from typing import Iterable, List

from loguru import logger

from ...exceptions import DataError, ValidationError


class CorpusRepository:
    """1行1文のUTF-8テキストの読み書き"""

    @staticmethod
    def read_lines(path: Path) -> List[str]:
        """行のリストを取得（行末の改行・CRは除去）"""
        path = Path(path)
        if not path.is_file():
            raise ValidationError(f"file not found: {path}")

        data = path.read_bytes()
        if not data:
            return []
        raw_lines = data.split(b"\n")
        if raw_lines[-1] == b"":
            raw_lines.pop()

        lines = []
        for line_no, raw in enumerate(raw_lines, start=1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise DataError(f"{path}: invalid UTF-8 at line {line_no} ({e.reason})")
            lines.append(line[:-1] if line.endswith("\r") else line)

        logger.debug(f"Read {len(lines)} lines from {path}")
        return lines

    @staticmethod
    def write_lines(path: Path, lines: Iterable[str]):
        """1行ずつ末尾改行付きで書き出し"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for line in lines:
                f.write(line)
                f.write("\n")

    @staticmethod
    def write_text(path: Path, text: str):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)

    @staticmethod
    def read_text(path: Path) -> str:
        path = Path(path)
        if not path.is_file():
            raise DataError(f"artifact not found: {path}")
        try:
            return path.read_bytes().decode("utf-8")
        except UnicodeDecodeError as e:
            raise DataError(f"{path}: invalid UTF-8 ({e.reason})")
