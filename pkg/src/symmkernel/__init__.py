"""Steady-state degeneracy of Lindblad systems with non-Abelian strong symmetries."""

__version__ = "0.1.0"
