"""Exact combinatorics of normal and almost normal surfaces, blocks and bounds."""

__version__ = "0.1.0"
