"""Exact controlled algebra over the line: geometric modules, squeezing and vanishing."""

__version__ = "0.1.0"
