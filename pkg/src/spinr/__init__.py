"""Invariant twisted spinors on projective spaces."""

__version__ = "0.1.0"
