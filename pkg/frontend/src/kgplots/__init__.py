"""Publication-style figures for the lattice Klein-Gordon result tables."""

__version__ = "0.1.0"

from .figures import FigureSpec, SchemaError, render

__all__ = ["FigureSpec", "SchemaError", "render"]
