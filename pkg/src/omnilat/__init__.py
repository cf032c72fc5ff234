"""Maximal partial transversal spectra of Latin squares and group tables."""

__version__ = "0.1.0"
