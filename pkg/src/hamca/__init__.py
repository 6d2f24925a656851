"""Hamiltonian cellular automata over Gaussian integers: exact dynamics and continuum checks."""

__version__ = "0.1.0"
