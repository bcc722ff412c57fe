"""Handwriting localization toolkit for scanned documents."""

__version__ = "0.1.0"
