"""成果物ストレージ（モデルディレクトリ・ファイル形式）"""
