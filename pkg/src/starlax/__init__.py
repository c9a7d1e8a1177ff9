"""Exact Moyal/PSDO symbol calculus for Lax hierarchies."""

__version__ = "0.1.0"
