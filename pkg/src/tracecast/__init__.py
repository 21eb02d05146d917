"""Cellular automata trace subshifts: decision procedures, synthesis and verification."""

__version__ = "0.1.0"
