"""Circuits to one-way measurement patterns and back."""

__version__ = "0.1.0"
