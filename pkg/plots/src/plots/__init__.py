"""Presentation layer for the simulation CLI's figure CSVs.

Reads only the CSV contract (never the solver library) and renders each
preset id to a deterministic PNG or SVG.
"""

from .errors import MissingColumnError, PlotsError
from .figures import FIGURES, FigureDef
from .reader import Table, read_table

__version__ = "0.1.0"

__all__ = [
    "FIGURES",
    "FigureDef",
    "MissingColumnError",
    "PlotsError",
    "Table",
    "read_table",
    "__version__",
]
