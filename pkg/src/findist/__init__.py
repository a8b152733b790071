"""Numerical laboratory for Cantor-type maps with exponentially integrable distortion."""

__version__ = "0.1.0"
