"""Figure rendering for nsse CSV datasets.

Consumes only the CSV contract (named columns plus a '#'-prefixed
metadata header); never recomputes physics.
"""

from .render import FigureRecipe, render, render_outputs
from .schema import SchemaError, Table, read_table

__version__ = "0.1.0"

__all__ = [
    "FigureRecipe", "SchemaError", "Table", "read_table", "render",
    "render_outputs", "__version__",
]
