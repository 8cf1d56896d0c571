"""Figure rendering for the Local SGD simulator's CSV outputs."""

from .render import KINDS, FigureSpec, SchemaError, render

__all__ = ["KINDS", "FigureSpec", "SchemaError", "render"]
