"""Singular spin-flip point interactions for the two-channel 1D Schroedinger operator."""

__version__ = "0.1.0"
