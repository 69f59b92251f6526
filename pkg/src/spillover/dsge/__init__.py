"""Small open economy model: calibration, steady state, solution, and IRFs."""

from . import bgg
from .irf import OBSERVABLE_NAMES, OBSERVABLES, SolvedModel, observable_matrix, solve_model
from .model import N_SHOCKS, N_VARS, SHOCKS, VARIABLES, Anchors, residuals
from .params import DsgeParams, DsgeParamError
from .solve import LinearModel, SolutionError, StateSpace, linearize, solve_linear
from .steady import SteadyState, SteadyStateError, compute_steady_state

__all__ = [
    "bgg",
    "Anchors",
    "DsgeParams",
    "DsgeParamError",
    "LinearModel",
    "N_SHOCKS",
    "N_VARS",
    "OBSERVABLES",
    "OBSERVABLE_NAMES",
    "SHOCKS",
    "SolutionError",
    "SolvedModel",
    "StateSpace",
    "SteadyState",
    "SteadyStateError",
    "VARIABLES",
    "compute_steady_state",
    "linearize",
    "observable_matrix",
    "residuals",
    "solve_linear",
    "solve_model",
]
