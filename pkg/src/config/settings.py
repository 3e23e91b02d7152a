"""
アプリケーション設定
"""

import sys
from pydantic_settings import BaseSettings, SettingsConfigDict
from loguru import logger


class Settings(BaseSettings):
    """アプリケーション設定（ログ・既定ディレクトリのみ）"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="SMT_",
        extra="ignore",
        protected_namespaces=(),
    )

    # ログ設定
    log_level: str = "INFO"

    # ディレクトリ設定
    model_dir: str = "./data/models"


# グローバル設定インスタンス
settings = Settings()


def setup_logging(level: str = None):
    """loguruの出力先を標準エラー1本に設定"""
    logger.remove()
    logger.add(
        sys.stderr,
        level=(level or settings.log_level).upper(),
        format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function} - {message}",
    )
