"""CRSS - numerical stability toolkit for Sobolev-type inequalities on the CR sphere."""

__version__ = "0.1.0"
