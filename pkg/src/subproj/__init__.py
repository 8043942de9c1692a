"""Exact-arithmetic homological algebra over finite-dimensional F_p-algebras."""

__version__ = "0.1.0"
