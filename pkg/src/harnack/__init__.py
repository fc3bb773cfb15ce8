"""Numerical toolkit for Harnack and Z-domination of finite-dimensional contractions."""

__version__ = "0.1.0"
