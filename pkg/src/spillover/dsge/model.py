"""Equilibrium conditions of the small open economy model.

The model is quarterly. A representative household consumes a CES bundle of
domestic and imported goods, supplies labor, and splits deposits between
pesos and dollars subject to a quadratic penalty around a target share, which
makes sterilized reserve operations matter. Domestic intermediate producers
face Calvo pricing in pesos; export input producers face Calvo pricing in
dollars. Capital producers pay flow investment adjustment costs.
Entrepreneurs finance capital with net worth and bank loans (part peso, part
dollar) under a costly-state-verification contract with a unit-mean lognormal
idiosyncratic shock; banks earn zero profit state by state. The central bank
follows an interest-rate rule responding to inflation, output, and the
detrended level of the exchange rate, and an intervention rule steering
reserves toward a target proportional to gross short-term dollar liabilities.
Foreign demand and the foreign interest rate follow a bivariate VAR(1) with
lower-triangular impact loadings.

``residuals`` evaluates every condition at ``(x_next, x_now, x_prev, eps)``
where each argument carries a trailing batch axis, expectations are replaced
by their time-t+1 arguments (exact to first order), and a root of the system
with all three arguments equal and zero shocks is a steady state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bgg
from .params import DsgeParams

VARIABLES = (
    "c", "lab", "lam", "w", "rk", "y", "kcap", "inv", "pk", "pd",
    "q", "p_i", "pic", "pid", "ptil", "f1", "f2", "disp", "mc", "rd",
    "rstar", "yf", "thsh", "db", "sdep", "phat", "rkg", "omb", "lev", "nw",
    "zx", "be", "bdol", "fstar", "fbar", "bfstar", "xex", "xd", "xm", "px",
    "pdx", "pixd", "rtilx", "f1x", "f2x", "dispx", "cd", "cm", "invd", "invm",
    "bcb",
)
SHOCKS = ("eps_ystar", "eps_rstar", "eps_r")

N_VARS = len(VARIABLES)
N_SHOCKS = len(SHOCKS)
VINDEX = {name: i for i, name in enumerate(VARIABLES)}


@dataclass(frozen=True)
class Anchors:
    """Steady-state levels the policy and foreign blocks are anchored to.

    ``w_e`` is the per-period transfer funding entering entrepreneurs,
    derived in the steady state to support the targeted finance premium.
    ``bfstar`` and ``bf_scale`` center the debt-elastic spread on banks'
    foreign funding (the spread is one at the steady state).
    """

    rd: float
    rstar: float
    yf: float
    y: float
    q: float
    w_e: float = 0.0
    bfstar: float = 0.0
    bh: float = 0.0
    db: float = 0.0
    bf_scale: float = 1.0


class _View:
    """Attribute access into the (N_VARS, batch) array by variable name."""

    __slots__ = ("_a",)

    def __init__(self, array):
        self._a = array

    def __getattr__(self, name):
        return self._a[VINDEX[name]]


def residuals(
    p: DsgeParams,
    a: Anchors,
    x_next: np.ndarray,
    x_now: np.ndarray,
    x_prev: np.ndarray,
    eps: np.ndarray,
) -> np.ndarray:
    """Stack all equilibrium-condition residuals, shape (N_VARS, batch)."""
    vp, v, vm = _View(x_next), _View(x_now), _View(x_prev)
    e_ystar, e_rstar, e_r = eps[0], eps[1], eps[2]

    thb = p.theta * p.beta
    thbx = p.theta_star * p.beta
    eps_d, eps_x = p.epsilon, p.epsilon_x

    # contract integrals at the current and next-period cutoffs
    cur = bgg.contract(v.omb, p.sigma_omega, p.mu)
    nxt = bgg.contract(vp.omb, p.sigma_omega, p.mu)
    lam_e = nxt["gamma_prime"] / (nxt["gamma_prime"] - p.mu * nxt["g_prime"])

    # banks fund the dollar leg abroad at the world rate times a spread that
    # increases in their outstanding foreign position; households' dollar
    # savings are foreign bonds whose return carries a premium declining in
    # the position (both keep external stocks stationary, and the haircut
    # accrues to foreign intermediaries through the balance of payments)
    spread_prev = np.exp(p.chi_bf * (vm.bfstar - a.bfstar) / a.bf_scale)
    spread_now = np.exp(p.chi_bf * (v.bfstar - a.bfstar) / a.bf_scale)
    bh_prev = vm.thsh * vm.db / vm.q
    bh_now = v.thsh * v.db / v.q
    prem_prev = np.exp(-p.chi_h * (bh_prev - a.bh) / a.bf_scale)
    prem_now = np.exp(-p.chi_h * (bh_now - a.bh) / a.bf_scale)

    # realized and expected bank funding rates (peso/dollar mix)
    rf_now = p.phi_split * vm.rd + (1 - p.phi_split) * v.sdep * vm.rstar * spread_prev
    rf_next = p.phi_split * v.rd + (1 - p.phi_split) * vp.sdep * v.rstar * spread_now

    # investment growth and adjustment costs S(x) = kappa/2 (x-1)^2
    x_now_g = v.inv / vm.inv
    x_next_g = vp.inv / v.inv
    s_now = 0.5 * p.kappa * (x_now_g - 1.0) ** 2
    sp_now = p.kappa * (x_now_g - 1.0)
    sp_next = p.kappa * (x_next_g - 1.0)

    imports = v.cm + v.invm + v.xm
    monitoring = p.mu * cur["g"] * v.rkg * vm.pk * vm.kcap / v.pic

    # marginal cost of managing a larger deposit book; second order in the
    # deviation so it never touches the accounts, but it tilts the saving
    # margin just enough to keep household wealth mean reverting
    deposit_wedge = 1.0 + p.xi_db * (v.db - a.db) / a.bf_scale

    res = [
        # households
        v.lam * v.c - 1.0,
        v.lam * deposit_wedge - p.beta * vp.lam * v.rd / vp.pic,
        v.w * v.lam - v.lab**p.varphi,
        p.gamma_upsilon * (v.thsh - p.upsilon_share)
        - p.beta * (vp.lam / vp.pic) * (v.rd - vp.sdep * v.rstar * prem_now) * v.db,
        (1.0 - v.thsh) * v.db - p.phi_split * v.be - v.bcb,
        # production
        v.y * v.disp - vm.kcap**p.alpha * v.lab ** (1 - p.alpha),
        v.w * v.lab - v.mc * v.pd * (1 - p.alpha) * vm.kcap**p.alpha * v.lab ** (1 - p.alpha),
        v.rk * vm.kcap - v.mc * v.pd * p.alpha * vm.kcap**p.alpha * v.lab ** (1 - p.alpha),
        # domestic Calvo block
        v.f1 - v.lam * v.pd * v.mc * v.y - thb * vp.pid**eps_d * vp.f1,
        v.f2 - v.lam * v.pd * v.y - thb * vp.pid ** (eps_d - 1) * vp.f2,
        v.ptil * (eps_d - 1) * v.f2 - eps_d * v.f1,
        p.theta * v.pid ** (eps_d - 1) + (1 - p.theta) * v.ptil ** (1 - eps_d) - 1.0,
        v.disp - p.theta * v.pid**eps_d * vm.disp - (1 - p.theta) * v.ptil ** (-eps_d),
        # relative prices and demands
        p.omega_c * v.pd ** (1 - p.eta_c) + (1 - p.omega_c) * v.q ** (1 - p.eta_c) - 1.0,
        v.p_i ** (1 - p.nu_i) - p.gamma_i * v.pd ** (1 - p.nu_i) - (1 - p.gamma_i) * v.q ** (1 - p.nu_i),
        v.cd - p.omega_c * v.pd ** (-p.eta_c) * v.c,
        v.cm - (1 - p.omega_c) * v.q ** (-p.eta_c) * v.c,
        v.invd - p.gamma_i * (v.pd / v.p_i) ** (-p.nu_i) * v.inv,
        v.invm - (1 - p.gamma_i) * (v.q / v.p_i) ** (-p.nu_i) * v.inv,
        # capital producers
        v.kcap - (1 - p.delta) * vm.kcap - (1.0 - s_now) * v.inv,
        v.lam * v.p_i
        - v.lam * v.pk * (1.0 - s_now - x_now_g * sp_now)
        - p.beta * vp.lam * vp.pk * sp_next * x_next_g**2,
        # entrepreneurs and banks
        v.rkg * vm.pk - v.pic * (v.rk + (1 - p.delta) * v.pk),
        (cur["gamma"] - p.mu * cur["g"]) * v.rkg * vm.lev - rf_now * (vm.lev - 1.0),
        (1.0 - nxt["gamma"]) * vp.rkg
        + lam_e * ((nxt["gamma"] - p.mu * nxt["g"]) * vp.rkg - rf_next),
        v.lev * v.nw - v.pk * v.kcap,
        v.nw - p.gamma_e * (1.0 - cur["gamma"]) * v.rkg * vm.pk * vm.kcap / v.pic - a.w_e,
        v.be - v.pk * v.kcap + v.nw,
        v.q * v.bdol - (1 - p.phi_split) * v.be,
        v.zx * (v.lev - 1.0) - v.lev * vp.omb * vp.rkg,
        # policy
        np.log(v.rd / a.rd)
        - p.rho_r * np.log(vm.rd / a.rd)
        - (1 - p.rho_r)
        * (
            p.r_pi * np.log(v.pic / p.pi_bar_c)
            + p.r_y * np.log(v.y / a.y)
            + p.r_s * np.log(v.q * v.phat / a.q)
        )
        - e_r,
        v.phat - vm.phat * v.pic / p.pi_bar_c,
        np.log(v.fstar / v.fbar)
        - p.rho_fx * np.log(vm.fstar / vm.fbar)
        + p.theta_rstar * np.log(v.rstar / a.rstar),
        v.fbar
        - (p.upsilon_cb * (vm.rstar * vm.bdol + imports)) ** (1 - p.vartheta)
        * vm.fbar**p.vartheta,
        # exports
        v.xex - v.px ** (-p.eta_f) * v.yf,
        v.px ** (1 - p.eta_x) - p.gamma_x * v.pdx ** (1 - p.eta_x) - (1 - p.gamma_x),
        v.xd - p.gamma_x * (v.pdx / v.px) ** (-p.eta_x) * v.xex,
        v.xm - (1 - p.gamma_x) * v.px**p.eta_x * v.xex,
        v.f1x - v.lam * v.pd * v.xd - thbx * vp.pixd**eps_x * vp.f1x,
        v.f2x - v.lam * v.q * v.xd - thbx * vp.pixd**eps_x * vp.f2x,
        (eps_x - 1) * v.rtilx * v.pdx * v.f2x - eps_x * v.f1x,
        p.theta_star * v.pixd ** (eps_x - 1) + (1 - p.theta_star) * v.rtilx ** (1 - eps_x) - 1.0,
        v.dispx - p.theta_star * v.pixd**eps_x * vm.dispx - (1 - p.theta_star) * v.rtilx ** (-eps_x),
        v.pixd * vm.pdx - v.pdx,
        # market clearing and the balance of payments
        v.y - v.cd - v.invd - v.dispx * v.xd - monitoring / v.pd,
        (v.fstar + bh_now - v.bfstar)
        - vm.rstar * (vm.fstar + prem_prev * bh_prev)
        + vm.rstar * spread_prev * vm.bfstar
        - (v.px * v.xex - imports),
        v.bdol - v.bfstar,
        # sterilization bond stock: new issuance funds reserve purchases net
        # of matured reserve earnings, the levy retires excess bonds
        v.bcb
        - (vm.rd / v.pic) * vm.bcb
        - (v.q * v.fstar - v.q * vm.rstar * vm.fstar)
        - (vm.rd / v.pic) * vm.q * vm.fstar
        + v.q * vm.rstar * vm.fstar
        + p.tau_cb * (vm.bcb - vm.q * vm.fstar),
        # foreign block
        np.log(v.yf / a.yf)
        - p.a11 * np.log(vm.yf / a.yf)
        - p.a12 * np.log(vm.rstar / a.rstar)
        - p.sigma_ystar * e_ystar,
        np.log(v.rstar / a.rstar)
        - p.a21 * np.log(vm.yf / a.yf)
        - p.a22 * np.log(vm.rstar / a.rstar)
        - p.c21 * e_ystar
        - p.sigma_rstar * e_rstar,
        # identities
        v.sdep * vm.q - v.q * v.pic,
        v.pid * vm.pd - v.pic * v.pd,
    ]
    return np.stack(res)


def household_budget_gap(p: DsgeParams, x_ss: np.ndarray, w_e: float = 0.0) -> float:
    """Walras check: the household flow budget at the steady state.

    The budget is implied by the conditions in :func:`residuals` (goods
    market, balance of payments, zero-profit and transfer accounting), so a
    nonzero gap flags an accounting bug rather than a calibration problem.
    """
    v = _View(x_ss[:, None])
    pibar = p.pi_bar_c
    sbar = p.depreciation_trend
    cur = bgg.contract(v.omb, p.sigma_omega, p.mu)
    # gross nominal portfolio return on deposits carried into the period
    r_port = v.rd * (1.0 - v.thsh) + sbar * v.rstar * v.thsh
    profits_dom = v.pd * v.y - v.w * v.lab - v.rk * v.kcap
    profits_exp = (v.q * v.pdx - v.pd * v.dispx) * v.xd
    profits_cap = (v.pk - v.p_i) * v.inv  # S(1) = 0 at the steady state
    entrepreneur_payout = (1 - p.gamma_e) * (1 - cur["gamma"]) * v.rkg * v.pk * v.kcap / pibar
    cb_transfer = (sbar * v.rstar - v.rd) * v.q * v.fstar / pibar
    income = (
        v.w * v.lab
        + r_port * v.db / pibar
        + profits_dom
        + profits_exp
        + profits_cap
        + entrepreneur_payout
        + cb_transfer
        - w_e
    )
    outlay = v.c + v.db  # deposits roll over one for one in steady state
    return float((income - outlay)[0])
