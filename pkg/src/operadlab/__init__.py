"""Exact computations with colored dg operads and their infinitesimal bimodules."""

__version__ = "0.1.0"
