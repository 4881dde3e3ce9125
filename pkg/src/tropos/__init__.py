"""Tropicalization of positive Poisson varieties, with SL_n and its dual group as the worked case."""

__version__ = "0.1.0"
