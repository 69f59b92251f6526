"""First-order solution: numerical linearization and the QZ decomposition.

``linearize`` differentiates the equilibrium conditions around the steady
state into E_t[F x_{t+1} + G x_t + H x_{t-1} + M eps_t] = 0 using central
differences evaluated in one batched call, with a Richardson consistency
check across two step sizes. ``solve_linear`` stacks the system into a
generalized eigenvalue pencil, orders the stable block first, verifies the
saddle-path (root-count) condition, and returns the recursive solution
x_t = T x_{t-1} + R eps_t.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .model import N_SHOCKS, N_VARS, SHOCKS, VARIABLES, Anchors, residuals
from .params import DsgeParams
from .steady import SteadyState


class SolutionError(RuntimeError):
    """Raised when the linear system has no unique stable solution."""


@dataclass(frozen=True)
class LinearModel:
    """Coefficient matrices of E_t[F x' + G x + H x_prev + M eps] = 0."""

    fmat: np.ndarray
    gmat: np.ndarray
    hmat: np.ndarray
    mmat: np.ndarray
    variables: tuple[str, ...] = VARIABLES
    shocks: tuple[str, ...] = SHOCKS
    fd_consistency: float = 0.0


@dataclass(frozen=True)
class StateSpace:
    """Recursive solution x_t = T x_{t-1} + R eps_t in level deviations."""

    transition: np.ndarray
    impact: np.ndarray
    variables: tuple[str, ...]
    shocks: tuple[str, ...]
    spectral_radius: float
    n_stable: int
    n_unstable: int
    eigenvalues: np.ndarray = field(repr=False)

    @property
    def stable(self) -> bool:
        return self.spectral_radius < 1.0


def _jacobians(p: DsgeParams, anchors: Anchors, x0: np.ndarray, scale: float):
    """One-pass central-difference Jacobians at relative step ``scale``."""
    n, k = N_VARS, N_SHOCKS
    steps = scale * np.maximum(np.abs(x0), 1e-4)
    eps_step = scale

    n_in = 3 * n + k
    batch = 2 * n_in
    xp = np.tile(x0[:, None], (1, batch))
    xc = xp.copy()
    xm = xp.copy()
    eps = np.zeros((k, batch))
    blocks = (xp, xc, xm)
    for j in range(n_in):
        plus, minus = 2 * j, 2 * j + 1
        if j < 3 * n:
            block, var = divmod(j, n)
            blocks[block][var, plus] += steps[var]
            blocks[block][var, minus] -= steps[var]
        else:
            eps[j - 3 * n, plus] += eps_step
            eps[j - 3 * n, minus] -= eps_step

    res = residuals(p, anchors, xp, xc, xm, eps)
    out = []
    for block in range(3):
        jac = np.empty((n, n))
        for var in range(n):
            j = block * n + var
            jac[:, var] = (res[:, 2 * j] - res[:, 2 * j + 1]) / (2 * steps[var])
        out.append(jac)
    mjac = np.empty((n, k))
    for s in range(k):
        j = 3 * n + s
        mjac[:, s] = (res[:, 2 * j] - res[:, 2 * j + 1]) / (2 * eps_step)
    return out[0], out[1], out[2], mjac


def linearize(
    p: DsgeParams,
    ss: SteadyState,
    scale: float = 1e-5,
    check: bool = True,
    check_tol: float = 1e-6,
) -> LinearModel:
    """Differentiate the equilibrium conditions at the steady state.

    When ``check`` is on, Jacobians at step ``scale`` and ``scale/2`` are
    compared (relative to the overall coefficient magnitude) and the
    Richardson-extrapolated combination is returned.
    """
    coarse = _jacobians(p, ss.anchors, ss.values, scale)
    if not check:
        f, g, h, m = coarse
        return LinearModel(f, g, h, m)
    fine = _jacobians(p, ss.anchors, ss.values, scale / 2.0)
    norm = max(max(np.max(np.abs(j)) for j in coarse), 1.0)
    disagreement = max(
        np.max(np.abs(a - b)) for a, b in zip(coarse, fine)
    ) / norm
    if disagreement > check_tol:
        raise SolutionError(
            f"finite-difference Jacobians disagree across step sizes "
            f"({disagreement:.2e} relative)"
        )
    extrapolated = [(4.0 * b - a) / 3.0 for a, b in zip(coarse, fine)]
    return LinearModel(*extrapolated, fd_consistency=disagreement)


def solve_linear(lm: LinearModel, tol_unit: float = 1e-9) -> StateSpace:
    """Unique stable solution via the ordered generalized Schur decomposition.

    Only variables that actually enter with a lag are predetermined, so the
    pencil stacks (states_{t-1}, x_t); existence and uniqueness require the
    number of stable generalized eigenvalues to equal the number of states.
    Working on the reduced pencil keeps the reordering well conditioned.
    """
    n = lm.fmat.shape[0]

    # scale variables to comparable units and normalize equation rows; the
    # pencil spans several orders of magnitude otherwise, which degrades the
    # eigenvalue reordering badly enough to pollute the stable subspace
    colmax = np.maximum.reduce(
        [np.max(np.abs(lm.fmat), axis=0), np.max(np.abs(lm.gmat), axis=0), np.max(np.abs(lm.hmat), axis=0)]
    )
    colmax[colmax <= 0] = 1.0
    col = 1.0 / colmax
    fmat = lm.fmat * col
    gmat = lm.gmat * col
    hmat = lm.hmat * col
    row = np.maximum.reduce(
        [np.max(np.abs(fmat), axis=1), np.max(np.abs(gmat), axis=1), np.max(np.abs(hmat), axis=1)]
    )
    row[row <= 0] = 1.0
    fmat = fmat / row[:, None]
    gmat = gmat / row[:, None]
    hmat = hmat / row[:, None]

    # the lagged block may have lower rank than it has nonzero columns (lags
    # entering only through composites); the true predetermined quantities
    # are the independent combinations, found by a rank-revealing SVD
    u_h, s_h, vt_h = np.linalg.svd(hmat)
    ns = int(np.sum(s_h > 1e-8 * max(s_h[0], 1.0)))
    if ns == 0:
        raise SolutionError("model has no predetermined variables")
    hs = u_h[:, :ns] * s_h[:ns]  # n x ns
    sel = vt_h[:ns]  # ns x n, states are sel @ x_{t-1}

    dim = ns + n
    a = np.zeros((dim, dim))
    b = np.zeros((dim, dim))
    a[:ns, :ns] = np.eye(ns)
    a[ns:, ns:] = fmat
    b[:ns, ns:] = sel
    b[ns:, :ns] = -hs
    b[ns:, ns:] = -gmat

    def inside(alpha, beta):
        # pairs with beta ~ 0 are eigenvalues at infinity; without the floor
        # their noise-level (alpha, beta) can classify as stable and inject a
        # zero-state direction into the leading block
        return (np.abs(beta) > 1e-10) & (np.abs(alpha) < (1.0 - tol_unit) * np.abs(beta))

    # dynamics eigenvalues solve det(B - lambda A) = 0, which in scipy's
    # convention is the pencil (B, A); stable deflating subspace first
    aa, bb, alpha, beta, _, z = scipy.linalg.ordqz(b, a, sort=inside, output="real")
    with np.errstate(divide="ignore", invalid="ignore"):
        eigs = np.where(np.abs(beta) > 1e-13, np.abs(alpha / beta), np.inf)
    n_stable = int(np.sum(inside(alpha, beta)))
    n_unstable = dim - n_stable
    if n_stable != ns:
        kind = "indeterminacy" if n_stable > ns else "no stable solution"
        raise SolutionError(
            f"root-count condition fails ({kind}): {n_stable} stable roots for "
            f"{ns} predetermined variables ({n_unstable} unstable/infinite)"
        )
    z11 = z[:ns, :ns]
    z21 = z[ns:, :ns]
    cond = np.linalg.cond(z11)
    if not np.isfinite(cond) or cond > 1e12:
        raise SolutionError("rank condition fails: stable subspace is degenerate")
    policy = z21 @ np.linalg.inv(z11)  # scaled x_t on scaled states_{t-1}
    transition = policy @ sel
    # undo the variable scaling: x = col * x_scaled
    transition = col[:, None] * transition / col[None, :]

    lhs = lm.fmat @ transition + lm.gmat
    quad = lhs @ transition + lm.hmat
    if np.max(np.abs(quad)) > 1e-6 * max(np.max(np.abs(lm.hmat)), 1.0):
        raise SolutionError(
            f"solution does not satisfy the quadratic matrix equation "
            f"(residual {np.max(np.abs(quad)):.2e})"
        )
    impact = -np.linalg.solve(lhs, lm.mmat)
    radius = float(np.max(np.abs(np.linalg.eigvals(transition))))
    return StateSpace(
        transition=transition,
        impact=impact,
        variables=lm.variables,
        shocks=lm.shocks,
        spectral_radius=radius,
        n_stable=n_stable,
        n_unstable=n_unstable,
        eigenvalues=eigs,
    )
