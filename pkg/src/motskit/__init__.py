"""Numerical checks of rigidity statements for marginally outer trapped boundaries."""

__version__ = "0.1.0"
