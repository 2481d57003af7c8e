"""Exact analysis of planar self-similar replication tiles."""

__version__ = "0.1.0"
