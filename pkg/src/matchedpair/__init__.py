"""Matched-pair Lie groups, algebras and second-order reduced dynamics."""

__version__ = "0.1.0"
