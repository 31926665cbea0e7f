"""Berezin-Toeplitz reductions of metric perturbations of the Landau Hamiltonian."""

__version__ = "0.1.0"
