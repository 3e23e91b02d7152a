"""
例外定義（CLI終了コードを保持）
"""


class SmtError(Exception):
    """ツールキット共通の基底例外"""

    exit_code: int = 3

    def __init__(self, message: str, stage: str = ""):
        super().__init__(message)
        self.stage = stage


class ValidationError(SmtError):
    """設定・引数・事前条件の違反"""

    exit_code = 1


class DataError(SmtError):
    """入力データ・成果物ファイルの不整合"""

    exit_code = 2
