#!/usr/bin/env python3
"""
英語・インド諸語 SMTツールキット メインエントリーポイント
"""

import sys

from scripts.smt_manager import main

if __name__ == "__main__":
    sys.exit(main())
