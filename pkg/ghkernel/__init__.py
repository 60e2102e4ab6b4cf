"""Gauss hypergeometric compactly-supported covariance kernels."""

__version__ = "0.1.0"
