"""Model impulse responses mapped into observable units.

Responses are level deviations from the steady state; the observable map
converts them into percent deviations for quantities and prices and
annualized percentage points for interest rates and the entrepreneur
financing spread, which is how the empirical counterparts are measured.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import SHOCKS, VINDEX
from .params import DsgeParams, steady_cache_key
from .solve import StateSpace, linearize, solve_linear
from .steady import SteadyState, compute_steady_state

# observable name -> (kind, constituent variables); rates are reported in
# annualized percentage points, everything else in percent of steady state
OBSERVABLES = (
    ("rstar", "rate", ("rstar",)),
    ("policy_rate", "rate", ("rd",)),
    ("rer", "percent", ("q",)),
    ("cpi", "percent", ("phat",)),
    ("output", "percent", ("y",)),
    ("spread", "spread", ("zx", "rd")),
    ("reserves", "percent", ("fstar",)),
    ("ner", "ner", ("q", "phat")),
)
OBSERVABLE_NAMES = tuple(name for name, _, _ in OBSERVABLES)


def observable_matrix(ss: SteadyState) -> np.ndarray:
    """Selection matrix mapping level deviations to observable units."""
    z = np.zeros((len(OBSERVABLES), len(ss.values)))
    for row, (_, kind, vars_) in enumerate(OBSERVABLES):
        if kind == "rate":
            z[row, VINDEX[vars_[0]]] = 400.0 / ss[vars_[0]]
        elif kind == "percent":
            z[row, VINDEX[vars_[0]]] = 100.0 / ss[vars_[0]]
        elif kind == "spread":
            z[row, VINDEX[vars_[0]]] = 400.0 / ss[vars_[0]]
            z[row, VINDEX[vars_[1]]] = -400.0 / ss[vars_[1]]
        elif kind == "ner":
            z[row, VINDEX[vars_[0]]] = 100.0 / ss[vars_[0]]
            z[row, VINDEX[vars_[1]]] = 100.0 / ss[vars_[1]]
    return z


@dataclass(frozen=True)
class SolvedModel:
    """Steady state, linear solution, and the observable map for one calibration."""

    params: DsgeParams
    steady: SteadyState
    space: StateSpace
    obs_matrix: np.ndarray

    def irf_states(self, shock: str, horizon: int, size: float = 1.0) -> np.ndarray:
        """Level-deviation paths (horizon+1, n_vars) after a date-0 shock."""
        if shock not in SHOCKS:
            raise KeyError(f"unknown shock {shock!r}; choose from {SHOCKS}")
        j = SHOCKS.index(shock)
        n = len(self.space.variables)
        path = np.empty((horizon + 1, n))
        path[0] = self.space.impact[:, j] * size
        for h in range(1, horizon + 1):
            path[h] = self.space.transition @ path[h - 1]
        return path

    def irf_observables(self, shock: str, horizon: int, size: float = 1.0) -> dict[str, np.ndarray]:
        """Observable responses keyed by name, each of length horizon+1."""
        states = self.irf_states(shock, horizon, size)
        mapped = states @ self.obs_matrix.T
        return {name: mapped[:, i] for i, name in enumerate(OBSERVABLE_NAMES)}


_STEADY_CACHE: dict[tuple, SteadyState] = {}


def solve_model(p: DsgeParams, check_fd: bool = False) -> SolvedModel:
    """Steady state + linearization + QZ solution for one calibration.

    Steady states are cached on the parameters that affect them, which makes
    repeated solves during estimation (where mostly dynamics parameters move)
    cheap. ``check_fd`` turns on the two-step-size differentiation check.
    """
    key = steady_cache_key(p)
    ss = _STEADY_CACHE.get(key)
    if ss is None:
        ss = compute_steady_state(p)
        if len(_STEADY_CACHE) > 256:
            _STEADY_CACHE.clear()
        _STEADY_CACHE[key] = ss
    lm = linearize(p, ss, check=check_fd)
    space = solve_linear(lm)
    return SolvedModel(params=p, steady=ss, space=space, obs_matrix=observable_matrix(ss))
