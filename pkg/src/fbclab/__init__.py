"""Computational workbench for free-by-cyclic groups with polynomially growing monodromy."""

__version__ = "0.1.0"
