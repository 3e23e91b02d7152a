"""ファイル形式ごとのリポジトリ"""
