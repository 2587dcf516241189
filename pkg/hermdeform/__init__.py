"""hermdeform - 変形 Hermite 多項式族の厳密計算ツール"""

__version__ = "1.0.0"
