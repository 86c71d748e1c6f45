"""Transformer classifier sidecar implementing the foodkb wire contract."""

__version__ = "0.1.0"
