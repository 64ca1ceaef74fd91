"""Pair-correlation statistics of Hecke angles and their family averages."""

__version__ = "0.1.0"
