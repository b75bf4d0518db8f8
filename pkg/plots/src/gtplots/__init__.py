"""Figure rendering for group-testing sweep and landscape CSVs."""

from .render import KINDS, PlotSpec, SchemaError, render

__version__ = "0.1.0"
