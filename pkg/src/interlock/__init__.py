"""Explicit construction and numerical checks for a 2-chain locked in an open 10-chain."""

__version__ = "0.1.0"
