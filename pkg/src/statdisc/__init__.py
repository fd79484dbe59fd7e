"""Explicit stationary discs attached to strongly Levi nondegenerate quadrics."""

__version__ = "0.1.0"
