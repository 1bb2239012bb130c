"""Render figure analogues from quasicharge CSV/JSON output."""

from .render import FIGURES, FigureSpec, render

__version__ = "0.1.0"

__all__ = ["FigureSpec", "render", "FIGURES", "__version__"]
