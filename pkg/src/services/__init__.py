"""ビジネスロジック"""
