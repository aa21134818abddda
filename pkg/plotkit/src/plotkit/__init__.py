"""Batch figure rendering for blowuplab CSV/JSON artifacts."""

from .figures import FigureSpec, PlotkitError, render

__version__ = "0.1.0"
__all__ = ["FigureSpec", "PlotkitError", "render"]
