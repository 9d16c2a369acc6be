"""Exact diagonalization of a pi-flux lattice pairing model."""

__version__ = "0.1.0"
