"""Saturated hamiltonian (l,k)-cycle constructions with brute-force oracles."""

__version__ = "0.1.0"
