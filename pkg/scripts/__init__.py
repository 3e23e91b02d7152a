"""スクリプト"""
