"""Simulated narrative tour-guide robot for a desk-scale museum."""

__version__ = "0.1.0"
