"""Structural identification of the reduced-form posterior draws.

Two schemes are supported. The sign-restriction scheme draws orthonormal
rotations uniformly (QR of a Gaussian matrix with positive-diagonal
normalization), forms candidate impact matrices chol(Sigma) @ Q, and keeps a
rotation only when the two labeled columns move the rate surprise up while
moving the stock surprise down (labelled "pure_mp") respectively up
(labelled "info"). The recursive scheme orders the rate surprise first and
uses the Cholesky factor directly. Both produce impact matrices A0inv with
A0inv @ A0inv.T = Sigma, from which impulse responses and forecast-error
variance decompositions follow.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass

import numpy as np

from .bvar import PosteriorDraw, reduced_irf, worker_count

PURE_MP = "pure_mp"
INFO = "info"
OTHER = "other"


class IdentifyError(ValueError):
    pass


@dataclass(frozen=True)
class SignRestrictionSpec:
    """Which rows carry the sign restrictions and how hard to try.

    rate_index / stock_index are positions of the two surprise variables in
    the VAR ordering; both restrictions bind on impact only. pure_mp gets
    (rate +, stock -), info gets (rate +, stock +), strictly.
    """

    rate_index: int = 0
    stock_index: int = 1
    max_attempts: int = 1000

    def __post_init__(self):
        if self.rate_index == self.stock_index:
            raise IdentifyError("rate and stock surprise indices must differ")
        if self.max_attempts < 1:
            raise IdentifyError("max_attempts must be >= 1")


@dataclass(frozen=True)
class StructuralDraw:
    """A reduced-form draw plus an accepted impact matrix.

    impact column j is the period-0 response to structural shock j;
    shock_labels names the labeled columns, everything else is "other".
    """

    parent: PosteriorDraw
    impact: np.ndarray  # (N, N)
    shock_labels: tuple[str, ...]
    attempts: int = 1

    @property
    def n_vars(self) -> int:
        return self.impact.shape[0]


def draw_rotation(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform orthonormal matrix via QR with positive R diagonal."""
    if dim < 1:
        raise IdentifyError("dimension must be >= 1")
    a = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(a)
    return q * np.sign(np.diag(r))


def _satisfies_signs(impact: np.ndarray, spec: SignRestrictionSpec) -> np.ndarray | None:
    """Sign-normalize the two labeled columns in place; None if infeasible.

    Each column may be flipped (shock signs are arbitrary); after flipping
    the rate-surprise response positive, column 0 must push the stock
    surprise strictly down and column 1 strictly up.
    """
    out = impact.copy()
    for col, stock_sign in ((0, -1.0), (1, +1.0)):
        rate = out[spec.rate_index, col]
        if rate == 0.0:
            return None
        if rate < 0:
            out[:, col] = -out[:, col]
        if out[spec.stock_index, col] * stock_sign <= 0.0:
            return None
    return out


def identify_sign(
    draw: PosteriorDraw,
    spec: SignRestrictionSpec,
    rng: np.random.Generator,
) -> StructuralDraw | None:
    """Search rotations for this draw; None when the attempt budget runs out."""
    n = draw.n_vars
    if max(spec.rate_index, spec.stock_index) >= n:
        raise IdentifyError("sign-restriction indices outside the variable range")
    chol = np.linalg.cholesky(draw.sigma)
    for attempt in range(1, spec.max_attempts + 1):
        q = draw_rotation(n, rng)
        candidate = _satisfies_signs(chol @ q, spec)
        if candidate is not None:
            labels = tuple([PURE_MP, INFO] + [OTHER] * (n - 2))
            return StructuralDraw(draw, candidate, labels, attempts=attempt)
    return None


def identify_cholesky(
    draw: PosteriorDraw,
    ordering: list[int] | None = None,
    rate_index: int = 0,
) -> StructuralDraw:
    """Recursive identification with the chosen ordering (identity default).

    The impact matrix is the Cholesky factor of the reordered covariance
    mapped back to the original variable positions; the shock of the
    first-ordered variable is labelled "pure_mp" and sign-normalized so the
    rate surprise rises on impact.
    """
    n = draw.n_vars
    if ordering is None:
        ordering = list(range(n))
    if sorted(ordering) != list(range(n)):
        raise IdentifyError("ordering must be a permutation of the variable indices")
    perm = np.asarray(ordering)
    sigma_ord = draw.sigma[np.ix_(perm, perm)]
    chol = np.linalg.cholesky(sigma_ord)
    impact = np.zeros_like(chol)
    impact[perm, :] = chol  # rows back in original variable order
    if impact[rate_index, 0] < 0:
        impact[:, 0] = -impact[:, 0]
    labels = tuple([PURE_MP] + [OTHER] * (n - 1))
    return StructuralDraw(draw, impact, labels)


@dataclass
class IrfSet:
    """Responses stacked as (draw, shock, variable, horizon)."""

    responses: np.ndarray
    shock_labels: tuple[str, ...]
    variable_names: tuple[str, ...]

    @property
    def n_draws(self) -> int:
        return self.responses.shape[0]

    @property
    def horizon(self) -> int:
        return self.responses.shape[3] - 1


def structural_irf(sd: StructuralDraw, horizon: int) -> np.ndarray:
    """Responses (shock, variable, horizon); horizon 0 equals the impact column."""
    psis = reduced_irf(sd.parent, horizon)  # (H+1, N, N)
    # response of variable i to shock j at h: (Psi_h @ impact)[i, j]
    resp = np.einsum("hik,kj->jih", psis, sd.impact)
    return resp


def collect_irfs(
    draws: list[StructuralDraw],
    horizon: int,
    variable_names: list[str] | None = None,
) -> IrfSet:
    if not draws:
        raise IdentifyError("no accepted structural draws")
    n = draws[0].n_vars
    names = tuple(variable_names or draws[0].parent.names or [f"var{i}" for i in range(n)])
    workers = worker_count(len(draws))

    def one(i: int) -> np.ndarray:
        return structural_irf(draws[i], horizon)

    if workers == 1:
        stacked = [one(i) for i in range(len(draws))]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            stacked = list(pool.map(one, range(len(draws))))
    return IrfSet(np.stack(stacked), draws[0].shock_labels, names)


def quantile_bands(irfs: IrfSet, probs=(0.16, 0.5, 0.84)) -> np.ndarray:
    """Pointwise empirical quantiles across draws: (prob, shock, var, horizon)."""
    if irfs.n_draws < 2:
        raise IdentifyError("need at least 2 draws for quantile bands")
    return np.quantile(irfs.responses, probs, axis=0)


def fevd(sd: StructuralDraw, horizon: int) -> np.ndarray:
    """Forecast-error variance shares (variable, shock) at the given horizon.

    share(i, j) = sum_{s<h} resp_s(i,j)^2 / sum_j' sum_{s<h} resp_s(i,j')^2;
    rows sum to one over all structural shocks.
    """
    if horizon < 1:
        raise IdentifyError("FEVD horizon must be >= 1")
    resp = structural_irf(sd, horizon - 1)  # (shock, var, h)
    contrib = np.sum(resp**2, axis=2).T  # (var, shock)
    total = contrib.sum(axis=1, keepdims=True)
    return contrib / total


@dataclass
class IdentificationResult:
    draws: list[StructuralDraw]
    attempted: int
    scheme: str

    @property
    def acceptance_rate(self) -> float:
        return len(self.draws) / self.attempted if self.attempted else 0.0


def identify_all(
    posterior: list[PosteriorDraw],
    scheme: str,
    spec: SignRestrictionSpec | None = None,
    seed: int = 0,
) -> IdentificationResult:
    """Apply one identification scheme to every posterior draw.

    Each draw gets its own RNG substream; rejected draws contribute nothing.
    Output order follows the posterior draw order for any worker count.
    """
    if scheme not in ("sign", "cholesky"):
        raise IdentifyError(f"unknown scheme {scheme!r}")
    spec = spec or SignRestrictionSpec()
    seeds = np.random.SeedSequence(seed).spawn(len(posterior))
    workers = worker_count(len(posterior))

    def one(i: int) -> StructuralDraw | None:
        if scheme == "cholesky":
            return identify_cholesky(posterior[i], rate_index=spec.rate_index)
        return identify_sign(posterior[i], spec, np.random.default_rng(seeds[i]))

    if workers == 1:
        results = [one(i) for i in range(len(posterior))]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(len(posterior))))
    accepted = [r for r in results if r is not None]
    return IdentificationResult(accepted, len(posterior), scheme)
