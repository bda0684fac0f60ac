"""Spontaneous emission from a Gaussian wave packet under a moving coupling front."""

__version__ = "0.1.0"
