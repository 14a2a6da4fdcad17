"""Simulation and verification toolkit for two-type Lambda-Wright-Fisher processes and their Bernstein-coefficient dual."""

__version__ = "0.1.0"
