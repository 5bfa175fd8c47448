"""Genuine tripartite entanglement certification from Mermin-type statistics."""
__version__ = "0.1.0"
