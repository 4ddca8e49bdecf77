"""Exact evaluation and cross-checking of Diamond-diagram constants."""

__version__ = "0.1.0"
