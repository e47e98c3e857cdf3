"""Figure recipes reading qdrop run-directory tables (read-only)."""

__version__ = "0.1.0"

from .recipes import FigureRecipe, RECIPES, render
from .runread import RunReadError, read_manifest, read_series

__all__ = [
    "__version__",
    "FigureRecipe",
    "RECIPES",
    "render",
    "RunReadError",
    "read_manifest",
    "read_series",
]
