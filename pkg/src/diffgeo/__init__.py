"""Numerical differential geometry of curves and surfaces."""
__version__ = "0.1.0"
