"""Cycle-space spanning by short odd cycles in random graphs: exact GF(2)
machinery, path statistics, tail bounds and Monte Carlo experiments."""

__version__ = "0.1.0"
