"""Toolkit for building Arabic anaphoric-zero-pronoun training data:
detection and generation of two-sentence samples, agreement filtering,
and identification/resolution scoring."""

__version__ = "0.1.0"
