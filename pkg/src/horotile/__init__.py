"""Colourings of the 2-fold horocyclic tessellation of the hyperbolic plane."""

__version__ = "0.1.0"
