"""Numerics for Helson (multiplicative Hankel) matrices."""

__version__ = "0.1.0"
