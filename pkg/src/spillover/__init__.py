"""Monetary surprise event studies, sign-restricted Bayesian VARs, and a
small open economy model with IRF-matching estimation."""

__version__ = "0.1.0"

from . import artifacts, bvar, dsge, eventstudy, identify, ingest, irfmatch, synth

__all__ = [
    "artifacts",
    "bvar",
    "dsge",
    "eventstudy",
    "identify",
    "ingest",
    "irfmatch",
    "synth",
    "__version__",
]
