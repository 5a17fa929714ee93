"""Quantum-walk scattering off a single-site barrier and estimation of its height."""

__version__ = "0.1.0"
