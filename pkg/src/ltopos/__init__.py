"""Computations in presheaf topoi over finite categories."""

__version__ = "0.1.0"
