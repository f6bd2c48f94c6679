"""Quantum resource estimation: typed bloq graphs, cost analysis and simulation."""

__version__ = "0.1.0"
