"""Extremal loop weight modules for the quantum affinization of sl_infinity."""

__version__ = "0.1.0"
