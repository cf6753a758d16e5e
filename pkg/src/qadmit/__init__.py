"""Quantitative admissibility: representations with explicit moduli, metric
entropy of finite spaces, and the constructions built from them."""

__version__ = "0.1.0"
