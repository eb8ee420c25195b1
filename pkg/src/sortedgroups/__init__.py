"""Finite sorted groups: embedding-property decisions, universal covers with
replayable certificates, and the dual complete systems."""

__version__ = "0.1.0"
