"""テスト"""
