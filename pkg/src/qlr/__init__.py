"""Quantum linear regression: HHL circuit simulation and GLOA gate synthesis."""
__version__ = "0.1.0"
