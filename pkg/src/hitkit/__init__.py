"""Hitting laws of Bessel-Brownian diffusions and Poisson kernels of stable processes."""

__version__ = "0.1.0"
