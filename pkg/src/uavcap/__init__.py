"""Ergodic capacity of UAV-relayed (Rayleigh product) versus direct MIMO links."""

__version__ = "0.1.0"
