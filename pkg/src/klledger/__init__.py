"""Exact and numeric checks relating lattice VOA data, Nichols algebras and fusion."""

__version__ = "0.1.0"
