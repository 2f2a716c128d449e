"""Evolving continuous optimisers as Push programs."""

__version__ = "0.1.0"
