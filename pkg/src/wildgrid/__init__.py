"""Deterministic open-world survival gridworld with configurable mechanics."""

__version__ = "0.1.0"
