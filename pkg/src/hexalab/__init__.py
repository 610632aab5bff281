"""Computational toolkit for the hexacarpet: symbolic coding, cell graphs,
the intrinsic chain metric and discrete harmonic analysis."""

__version__ = "0.1.0"
