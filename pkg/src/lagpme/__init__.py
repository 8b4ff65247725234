"""Lagrangian schemes for porous-medium type diffusion."""
__version__ = "0.1.0"
