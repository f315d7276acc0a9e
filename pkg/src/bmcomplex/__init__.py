"""Exact computations with q-Schur algebras, Hecke permutation modules and the complexes built from them."""

__version__ = "0.1.0"
