"""Fractional Laplacian tools for antisymmetric maximum principles and moving planes."""

__version__ = "0.1.0"
