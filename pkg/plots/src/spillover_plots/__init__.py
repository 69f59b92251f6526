"""Figure rendering for the spillover pipeline's CSV outputs."""

from .render import KINDS, PlotJob, SchemaError, render

__all__ = ["KINDS", "PlotJob", "SchemaError", "render"]
