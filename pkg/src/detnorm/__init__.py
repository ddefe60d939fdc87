"""Exact computations with determinantal schemes: D_i complexes, the
three-column mapping cone, strand-wise Hom/Ext, and codimension-2 Chern data."""

__version__ = "0.1.0"
