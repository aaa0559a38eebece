"""Qubit state-vector toolkit for multi-particle bases, correlation
coefficients and direct teleportation protocols."""

__version__ = "0.1.0"
