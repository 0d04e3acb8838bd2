"""Coding schemes over the qubit amplitude damping channel."""

__version__ = "0.1.0"
