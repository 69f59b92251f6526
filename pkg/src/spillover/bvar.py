"""Reduced-form monthly VAR with a restricted surprise block.

The system stacks the surprise vector ``m_t`` on top of the macro vector
``y_t``. The surprise equations carry no lags and no constant (surprises are
serially unpredictable by construction), so ``u^m_t = m_t`` identically and
the likelihood factorizes into

* the marginal of ``m_t`` (an inverse-Wishart problem for its covariance) and
* the regression of ``y_t`` on lags of everything, a constant, and the
  *current* ``m_t`` (a conjugate Normal-inverse-Wishart problem).

Sampling the two blocks and reassembling gives exact, independent draws of
the joint innovation covariance and lag coefficients with the zero block
holding by construction in every draw.
"""

from __future__ import annotations

import concurrent.futures
import os
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import invwishart

from .ingest import MonthlyPanel


class BvarError(ValueError):
    """Raised for unusable samples or ill-posed configurations."""


def worker_count(n_tasks: int) -> int:
    """Worker cap from SPILLOVER_THREADS (default: single-threaded)."""
    raw = os.environ.get("SPILLOVER_THREADS", "1")
    try:
        cap = max(1, int(raw))
    except ValueError:
        cap = 1
    return max(1, min(cap, n_tasks))


@dataclass(frozen=True)
class VarConfig:
    """Estimation settings for the restricted VAR.

    lambda1 is the overall prior tightness, lambda2 the extra shrinkage on
    coefficients attached to surprise variables (their lags and current
    values), lambda3 the lag-decay power, lambda4 the constant's looseness.
    """

    n_lags: int = 12
    n_surprise: int = 2
    lambda1: float = 0.2
    lambda2: float = 0.5
    lambda3: float = 1.0
    lambda4: float = 100.0
    n_draws: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.n_lags < 1:
            raise BvarError("n_lags must be >= 1")
        if self.n_surprise < 1:
            raise BvarError("need at least one surprise variable")
        for lam in (self.lambda1, self.lambda2, self.lambda3, self.lambda4):
            if lam <= 0:
                raise BvarError("prior hyperparameters must be positive")
        if self.n_draws < 1:
            raise BvarError("n_draws must be >= 1")


@dataclass(frozen=True)
class PosteriorDraw:
    """One draw of the reduced-form system.

    coeffs[p] is the N x N lag-p matrix with the surprise rows identically
    zero; const is the N constant vector (zero in the surprise rows); sigma
    the N x N innovation covariance.
    """

    coeffs: np.ndarray  # (P, N, N)
    const: np.ndarray  # (N,)
    sigma: np.ndarray  # (N, N)
    n_surprise: int
    names: tuple[str, ...] = field(default=())

    @property
    def n_vars(self) -> int:
        return self.sigma.shape[0]

    @property
    def n_lags(self) -> int:
        return self.coeffs.shape[0]


def _lag_matrix(data: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (Y, X_lags) where row t of X_lags is [x_{t-1}, ..., x_{t-p}]."""
    T, n = data.shape
    Y = data[p:]
    X = np.hstack([data[p - k : T - k] for k in range(1, p + 1)])
    return Y, X


def _ar_residual_scales(data: np.ndarray, p: int) -> np.ndarray:
    """Univariate AR(p) residual standard deviations, used to scale the prior."""
    T, n = data.shape
    scales = np.empty(n)
    for j in range(n):
        y = data[p:, j]
        X = np.column_stack([np.ones(T - p)] + [data[p - k : T - k, j] for k in range(1, p + 1)])
        beta, *_ = np.linalg.lstsq(X, y, rcond=None)
        resid = y - X @ beta
        dof = max(1, len(y) - X.shape[1])
        scales[j] = np.sqrt(resid @ resid / dof)
        if scales[j] <= 0 or not np.isfinite(scales[j]):
            scales[j] = max(np.std(data[:, j]), 1e-8)
    return scales


@dataclass(frozen=True)
class _Posterior:
    """Sufficient statistics of the factorized posterior."""

    coef_mean: np.ndarray  # (K, Ny) conditional-regression coefficients
    coef_cov_chol: np.ndarray  # (K, K) lower Cholesky of the column covariance
    scale_y: np.ndarray  # IW scale of the conditional residual covariance
    dof_y: int
    scale_m: np.ndarray  # IW scale of the surprise covariance
    dof_m: int
    n_lags: int
    n_surprise: int
    n_vars: int
    names: tuple[str, ...]


def _fit_sufficient(panel: MonthlyPanel, cfg: VarConfig) -> _Posterior:
    data = np.asarray(panel.values, dtype=float)
    T, n = data.shape
    nm = cfg.n_surprise
    ny = n - nm
    if ny < 1:
        raise BvarError("panel must contain at least one non-surprise variable")
    roles = [c.role for c in panel.columns]
    if any(r != "surprise" for r in roles[:nm]) or any(r == "surprise" for r in roles[nm:]):
        raise BvarError("surprise columns must come first in the panel")
    p = cfg.n_lags
    t_eff = T - p
    if t_eff <= n * p + 20:
        raise BvarError(
            f"insufficient sample: {t_eff} effective observations for {n * p} lag "
            f"coefficients per equation (need > {n * p + 20})"
        )

    Y_all, X_lags = _lag_matrix(data, p)
    M = Y_all[:, :nm]
    Y = Y_all[:, nm:]
    # regressors: all lags, constant, current surprises
    X = np.hstack([X_lags, np.ones((t_eff, 1)), M])
    k = X.shape[1]

    scales = _ar_residual_scales(data, min(p, 4))
    sig_m, sig_y = scales[:nm], scales[nm:]

    # Minnesota layout: own first lag centered at 1 for the macro equations,
    # everything else at 0; tightness falls with lag, surprise regressors get
    # the lambda2 multiplier, the constant is nearly flat.
    prior_mean = np.zeros((k, ny))
    for j in range(ny):
        prior_mean[nm + j, j] = 1.0  # lag-1 own coefficient of macro var j
    omega_diag = np.empty(k)
    for lag in range(1, p + 1):
        for j in range(n):
            mult = cfg.lambda2 if j < nm else 1.0
            omega_diag[(lag - 1) * n + j] = (
                cfg.lambda1 * mult / (lag**cfg.lambda3 * scales[j])
            ) ** 2
    omega_diag[n * p] = cfg.lambda4**2
    omega_diag[n * p + 1 :] = (cfg.lambda1 * cfg.lambda2 / sig_m) ** 2

    omega_inv = 1.0 / omega_diag
    xtx = X.T @ X
    xty = X.T @ Y
    post_prec = xtx + np.diag(omega_inv)
    coef_cov = np.linalg.inv(post_prec)
    coef_cov = 0.5 * (coef_cov + coef_cov.T)
    coef_mean = coef_cov @ (xty + omega_inv[:, None] * prior_mean)

    nu0 = ny + 2  # weakly informative: prior mean of the IW equals diag(sig_y^2)
    s0 = np.diag(sig_y**2)
    resid_term = (
        Y.T @ Y
        + (prior_mean * omega_inv[:, None]).T @ prior_mean
        - coef_mean.T @ post_prec @ coef_mean
    )
    scale_y = s0 + resid_term
    scale_y = 0.5 * (scale_y + scale_y.T)
    dof_y = nu0 + t_eff

    nu0_m = nm + 2
    scale_m = M.T @ M + np.diag(sig_m**2)
    scale_m = 0.5 * (scale_m + scale_m.T)
    dof_m = nu0_m + t_eff

    try:
        chol = np.linalg.cholesky(coef_cov)
        np.linalg.cholesky(scale_y)
        np.linalg.cholesky(scale_m)
    except np.linalg.LinAlgError as exc:
        raise BvarError(f"posterior scale matrix is not positive definite: {exc}") from None

    return _Posterior(
        coef_mean=coef_mean,
        coef_cov_chol=chol,
        scale_y=scale_y,
        dof_y=dof_y,
        scale_m=scale_m,
        dof_m=dof_m,
        n_lags=p,
        n_surprise=nm,
        n_vars=n,
        names=tuple(panel.names),
    )


def _assemble_draw(post: _Posterior, rng: np.random.Generator) -> PosteriorDraw:
    nm, n, p = post.n_surprise, post.n_vars, post.n_lags
    ny = n - nm
    k = post.coef_mean.shape[0]

    sig_m = invwishart.rvs(df=post.dof_m, scale=post.scale_m, random_state=rng)
    sig_m = np.atleast_2d(sig_m)
    sig_e = invwishart.rvs(df=post.dof_y, scale=post.scale_y, random_state=rng)
    sig_e = np.atleast_2d(sig_e)

    z = rng.standard_normal((k, ny))
    gamma = post.coef_mean + post.coef_cov_chol @ z @ np.linalg.cholesky(sig_e).T

    lag_block = gamma[: n * p]  # (n*p, ny), rows ordered lag-major
    const_y = gamma[n * p]
    a_m = gamma[n * p + 1 :].T  # (ny, nm) loading of y on current m

    coeffs = np.zeros((p, n, n))
    for lag in range(p):
        coeffs[lag, nm:, :] = lag_block[lag * n : (lag + 1) * n].T
    const = np.zeros(n)
    const[nm:] = const_y

    sigma = np.empty((n, n))
    sigma[:nm, :nm] = sig_m
    cross = a_m @ sig_m
    sigma[nm:, :nm] = cross
    sigma[:nm, nm:] = cross.T
    sigma[nm:, nm:] = sig_e + a_m @ sig_m @ a_m.T
    sigma = 0.5 * (sigma + sigma.T)

    return PosteriorDraw(coeffs=coeffs, const=const, sigma=sigma, n_surprise=nm, names=post.names)


def fit_posterior(panel: MonthlyPanel, cfg: VarConfig) -> list[PosteriorDraw]:
    """Draw from the posterior of the restricted VAR.

    Draws are independent across indices. Each index gets its own RNG
    substream spawned from the seed, and results are assembled in index
    order, so the output is identical for any worker count.
    """
    post = _fit_sufficient(panel, cfg)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.n_draws)
    workers = worker_count(cfg.n_draws)

    def one(i: int) -> PosteriorDraw:
        return _assemble_draw(post, np.random.default_rng(seeds[i]))

    if workers == 1:
        return [one(i) for i in range(cfg.n_draws)]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(cfg.n_draws)))


def posterior_mean_draw(panel: MonthlyPanel, cfg: VarConfig) -> PosteriorDraw:
    """Point version of the posterior (coefficient mean, IW-mean covariances)."""
    post = _fit_sufficient(panel, cfg)
    nm, n, p = post.n_surprise, post.n_vars, post.n_lags
    ny = n - nm
    sig_m = post.scale_m / (post.dof_m - nm - 1)
    sig_e = post.scale_y / (post.dof_y - ny - 1)
    gamma = post.coef_mean
    lag_block = gamma[: n * p]
    a_m = gamma[n * p + 1 :].T
    coeffs = np.zeros((p, n, n))
    for lag in range(p):
        coeffs[lag, nm:, :] = lag_block[lag * n : (lag + 1) * n].T
    const = np.zeros(n)
    const[nm:] = gamma[n * p]
    sigma = np.empty((n, n))
    sigma[:nm, :nm] = sig_m
    cross = a_m @ sig_m
    sigma[nm:, :nm] = cross
    sigma[:nm, nm:] = cross.T
    sigma[nm:, nm:] = sig_e + a_m @ sig_m @ a_m.T
    return PosteriorDraw(coeffs, const, 0.5 * (sigma + sigma.T), nm, post.names)


def companion(draw: PosteriorDraw) -> tuple[np.ndarray, np.ndarray, bool]:
    """Companion matrix, its eigenvalues, and a stability flag."""
    p, n = draw.n_lags, draw.n_vars
    comp = np.zeros((n * p, n * p))
    for lag in range(p):
        comp[:n, lag * n : (lag + 1) * n] = draw.coeffs[lag]
    if p > 1:
        comp[n:, : n * (p - 1)] = np.eye(n * (p - 1))
    eigs = np.linalg.eigvals(comp)
    return comp, eigs, bool(np.all(np.abs(eigs) < 1.0))


def reduced_irf(draw: PosteriorDraw, horizon: int) -> np.ndarray:
    """Moving-average matrices Psi_h for h = 0..horizon (Psi_0 = I)."""
    if horizon < 0:
        raise BvarError("horizon must be >= 0")
    n, p = draw.n_vars, draw.n_lags
    comp, _, _ = companion(draw)
    psis = np.empty((horizon + 1, n, n))
    psis[0] = np.eye(n)
    power = np.eye(n * p)
    for h in range(1, horizon + 1):
        power = comp @ power
        psis[h] = power[:n, :n]
    return psis


def simulate_var(
    draw: PosteriorDraw,
    n_periods: int,
    rng: np.random.Generator,
    burn: int = 100,
) -> np.ndarray:
    """Simulate data from a (restricted) VAR draw; innovations ~ N(0, sigma)."""
    n, p = draw.n_vars, draw.n_lags
    chol = np.linalg.cholesky(draw.sigma)
    total = n_periods + burn + p
    data = np.zeros((total, n))
    shocks = rng.standard_normal((total, n)) @ chol.T
    for t in range(p, total):
        x = draw.const.copy()
        for lag in range(p):
            x += draw.coeffs[lag] @ data[t - 1 - lag]
        data[t] = x + shocks[t]
    return data[p + burn :]


def with_seed(cfg: VarConfig, seed: int) -> VarConfig:
    return replace(cfg, seed=seed)
