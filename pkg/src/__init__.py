"""英語・インド諸語 フレーズベース統計的機械翻訳ツールキット"""
