"""Minimum-distance estimation of the model's friction and intervention
parameters by matching impulse responses.

Empirical monthly IRFs are averaged into quarters, stacked against the
model's quarterly responses to the foreign interest rate shock, and weighted
by the inverse of the pointwise variances. The objective is minimized by a
deterministic multi-start Nelder-Mead search followed by a bounded
least-squares polish.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .dsge import DsgeParams, SolutionError, solve_model
from .dsge.steady import SteadyStateError

FREE_PARAMETERS = (
    "sigma_rstar", "a22", "kappa", "mu", "sigma_omega", "rho_fx", "theta_rstar",
)

DEFAULT_BOUNDS = {
    "sigma_rstar": (1e-4, 0.02),
    "a22": (0.5, 0.99),
    "kappa": (0.05, 6.0),
    "mu": (0.05, 0.45),
    "sigma_omega": (0.1, 0.45),
    "rho_fx": (0.0, 0.95),
    "theta_rstar": (0.0, 8.0),
}

# empirical variable -> model observable, for the seven matched series
DEFAULT_VARIABLE_MAP = {
    "us_rate": "rstar",
    "policy_rate": "policy_rate",
    "rer": "rer",
    "cpi": "cpi",
    "output": "output",
    "spread": "spread",
    "reserves": "reserves",
}

PENALTY = 1e10


class MatchError(ValueError):
    pass


def monthly_to_quarterly(series) -> np.ndarray:
    """Average consecutive months into quarters; a trailing partial quarter
    is dropped."""
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 1:
        raise MatchError("expected a one-dimensional monthly series")
    n_q = arr.size // 3
    if n_q == 0:
        raise MatchError("need at least 3 monthly observations")
    return arr[: 3 * n_q].reshape(n_q, 3).mean(axis=1)


@dataclass(frozen=True)
class MatchTarget:
    """Quarterly target moments: per variable, mean IRF and pointwise variance."""

    variables: tuple[str, ...]
    means: np.ndarray  # (n_vars, n_quarters)
    variances: np.ndarray  # (n_vars, n_quarters)

    def __post_init__(self):
        if self.means.shape != self.variances.shape:
            raise MatchError("means and variances must have matching shapes")
        if self.means.shape[0] != len(self.variables):
            raise MatchError("one row of moments per variable required")
        if np.any(self.variances <= 0):
            raise MatchError("pointwise variances must be strictly positive")

    @property
    def n_quarters(self) -> int:
        return self.means.shape[1]

    @property
    def n_moments(self) -> int:
        return self.means.size


def target_from_draws(
    variables: list[str],
    monthly_draws: np.ndarray,
    n_quarters: int = 12,
) -> MatchTarget:
    """Build quarterly targets from monthly IRF draws (draw, variable, month).

    Draws are averaged into quarters first; means and pointwise variances are
    taken across draws afterwards.
    """
    draws = np.asarray(monthly_draws, dtype=float)
    if draws.ndim != 3 or draws.shape[1] != len(variables):
        raise MatchError("monthly_draws must be (draws, variables, months)")
    n_q = min(n_quarters, draws.shape[2] // 3)
    quarterly = draws[:, :, : 3 * n_q].reshape(draws.shape[0], len(variables), n_q, 3).mean(axis=3)
    means = quarterly.mean(axis=0)
    variances = quarterly.var(axis=0, ddof=1)
    variances = np.maximum(variances, 1e-12)
    return MatchTarget(tuple(variables), means, variances)


def build_weight(target: MatchTarget) -> np.ndarray:
    """Diagonal weights: inverse pointwise variance, stacked like the moments."""
    return 1.0 / target.variances.reshape(-1)


@dataclass(frozen=True)
class EstimationProblem:
    target: MatchTarget
    fixed_params: DsgeParams = field(default_factory=DsgeParams)
    free_names: tuple[str, ...] = FREE_PARAMETERS
    bounds: dict = field(default_factory=lambda: dict(DEFAULT_BOUNDS))
    shock: str = "eps_rstar"
    variable_map: dict = field(default_factory=lambda: dict(DEFAULT_VARIABLE_MAP))

    def __post_init__(self):
        unknown = set(self.free_names) - set(FREE_PARAMETERS)
        if unknown:
            raise MatchError(f"cannot estimate {sorted(unknown)}; free set is {FREE_PARAMETERS}")
        for name in self.free_names:
            lo, hi = self.bounds[name]
            if not np.isfinite([lo, hi]).all() or hi <= lo:
                raise MatchError(f"bad bounds for {name}")
        missing = [v for v in self.target.variables if v not in self.variable_map]
        if missing:
            raise MatchError(f"no model mapping for target variables {missing}")

    def params_at(self, theta) -> DsgeParams:
        return self.fixed_params.override(**dict(zip(self.free_names, theta)))

    def lower(self) -> np.ndarray:
        return np.array([self.bounds[n][0] for n in self.free_names])

    def upper(self) -> np.ndarray:
        return np.array([self.bounds[n][1] for n in self.free_names])


def model_moments(problem: EstimationProblem, theta) -> np.ndarray:
    """Stacked model IRF moments at theta, shaped like the target means."""
    params = problem.params_at(theta)
    solved = solve_model(params)
    horizon = problem.target.n_quarters - 1
    irfs = solved.irf_observables(problem.shock, horizon)
    rows = [irfs[problem.variable_map[v]] for v in problem.target.variables]
    return np.vstack(rows)


def residual_vector(problem: EstimationProblem, theta) -> np.ndarray:
    """Weighted moment residuals sqrt(w) * (model - target), flattened."""
    moments = model_moments(problem, theta)
    diff = (moments - problem.target.means).reshape(-1)
    return diff * np.sqrt(build_weight(problem.target))


def objective(theta, problem: EstimationProblem) -> float:
    """The scalar V' Omega V; a large finite penalty where the model has no
    stable solution so derivative-free search can continue."""
    theta = np.asarray(theta, dtype=float)
    lo, hi = problem.lower(), problem.upper()
    if np.any(theta < lo) or np.any(theta > hi):
        overshoot = np.sum(np.maximum(lo - theta, 0) + np.maximum(theta - hi, 0))
        return PENALTY * (1.0 + overshoot)
    try:
        v = residual_vector(problem, theta)
    except (SolutionError, SteadyStateError, FloatingPointError):
        center_dist = float(np.sum((theta - 0.5 * (lo + hi)) ** 2 / (hi - lo) ** 2))
        return PENALTY * (1.0 + center_dist)
    return float(v @ v)


@dataclass
class EstimationResult:
    names: tuple[str, ...]
    estimates: np.ndarray
    objective: float
    start_log: list
    n_objective_calls: int
    residuals: np.ndarray
    converged: bool

    def as_dict(self) -> dict:
        return {
            "estimates": {n: float(v) for n, v in zip(self.names, self.estimates)},
            "objective": self.objective,
            "converged": self.converged,
            "n_objective_calls": self.n_objective_calls,
            "starts": self.start_log,
        }


def _starts(problem: EstimationProblem, n_starts: int, seed: int) -> np.ndarray:
    lo, hi = problem.lower(), problem.upper()
    rng = np.random.default_rng(seed)
    pts = [0.5 * (lo + hi)]
    pts += list(lo + rng.random((n_starts - 1, lo.size)) * (hi - lo))
    return np.array(pts[:n_starts])


def estimate(
    problem: EstimationProblem,
    n_starts: int = 8,
    seed: int = 0,
    maxiter: int = 400,
    polish: bool = True,
) -> EstimationResult:
    """Multi-start simplex search over the free parameters.

    Starts are deterministic given the seed; the best simplex solution is
    refined by bounded least squares on the weighted residuals (the moment
    objective is smooth inside the solvable region, so the refinement is
    cheap and sharpens the minimum considerably).
    """
    calls = 0

    def counted(theta):
        nonlocal calls
        calls += 1
        return objective(theta, problem)

    lo, hi = problem.lower(), problem.upper()
    log = []
    best = None
    for i, x0 in enumerate(_starts(problem, n_starts, seed)):
        res = optimize.minimize(
            counted,
            x0,
            method="Nelder-Mead",
            bounds=list(zip(lo, hi)),
            options={"maxiter": maxiter, "xatol": 1e-8, "fatol": 1e-12, "adaptive": True},
        )
        log.append({"start": i, "objective": float(res.fun), "x": [float(v) for v in res.x]})
        if best is None or res.fun < best.fun:
            best = res
    if best is None or best.fun >= PENALTY:
        raise MatchError("no start produced a solvable model; widen the bounds")

    x, fun = np.asarray(best.x), float(best.fun)
    converged = bool(best.success)
    if polish:
        try:
            ls = optimize.least_squares(
                lambda th: residual_vector(problem, th),
                np.clip(x, lo + 1e-12, hi - 1e-12),
                bounds=(lo, hi),
                xtol=1e-14,
                ftol=1e-14,
                gtol=1e-14,
                diff_step=1e-6,
            )
            calls += ls.nfev
            if ls.cost * 2.0 < fun:
                x, fun = ls.x, float(ls.cost * 2.0)
                converged = True
        except (SolutionError, SteadyStateError) as exc:
            log.append({"polish_failed": str(exc)})
    return EstimationResult(
        names=tuple(problem.free_names),
        estimates=x,
        objective=fun,
        start_log=log,
        n_objective_calls=calls,
        residuals=residual_vector(problem, x),
        converged=converged,
    )
