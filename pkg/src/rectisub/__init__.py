"""Numerical verification and construction of rectifying submanifolds of Euclidean space."""

__version__ = "0.1.0"
