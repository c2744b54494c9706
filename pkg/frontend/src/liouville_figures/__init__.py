"""Renderer for the liouville-lab figure CSVs; presentation only, no solving."""

__version__ = "0.1.0"
