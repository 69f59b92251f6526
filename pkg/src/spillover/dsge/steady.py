"""Non-stochastic steady state of the small open economy model.

The construction is staged: rates and the Calvo margins are closed-form, the
credit contract reduces to a one-dimensional cutoff problem (the net-worth
condition pins the contract multiplier, which pins the cutoff, after which
leverage and the return on capital are explicit), and the remaining open
economy block is a three-equation root-find in labor, the real exchange
rate, and the dollar-deposit share. The assembled point is then verified
against every equilibrium condition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import bgg
from .model import N_VARS, VINDEX, Anchors, residuals
from .params import DsgeParams


class SteadyStateError(RuntimeError):
    pass


@dataclass(frozen=True)
class SteadyState:
    """Steady-state levels, the anchors derived from them, and diagnostics.

    ``entry_transfer`` is the per-period transfer to entering entrepreneurs
    implied by the finance-premium target (zero under the no-transfer
    closure); it also lives on ``anchors`` for the dynamic equations.
    """

    values: np.ndarray  # (N_VARS,) ordered like model.VARIABLES
    anchors: Anchors
    max_residual: float
    entry_transfer: float = 0.0

    def __getitem__(self, name: str) -> float:
        return float(self.values[VINDEX[name]])

    def as_dict(self) -> dict[str, float]:
        return {name: float(self.values[i]) for name, i in VINDEX.items()}


def _calvo_margins(theta: float, beta: float, eps: float, pi: float):
    """Reset price, dispersion, and real marginal cost under trend inflation."""
    denom = 1.0 - theta * pi ** (eps - 1.0)
    if denom <= 0 or theta * pi**eps >= 1.0:
        raise SteadyStateError(
            "trend inflation too high for the Calvo block (theta pi^eps >= 1)"
        )
    ptil = (denom / (1.0 - theta)) ** (1.0 / (1.0 - eps))
    disp = (1.0 - theta) * ptil ** (-eps) / (1.0 - theta * pi**eps)
    mc = (
        (eps - 1.0)
        / eps
        * ptil
        * (1.0 - theta * beta * pi**eps)
        / (1.0 - theta * beta * pi ** (eps - 1.0))
    )
    return ptil, disp, mc


def _find_root_scan(gap, lo, hi0, grow, cap, what):
    """Bracket a sign change of ``gap`` on (lo, cap], tolerating +inf tails."""
    hi = hi0
    while hi < cap and gap(hi) <= 0:
        lo, hi = hi, hi * grow
    if hi >= cap and gap(hi) <= 0:
        raise SteadyStateError(f"no {what} found below {cap}")
    for _ in range(200):  # shrink past any singularity to a finite sign change
        if np.isfinite(gap(hi)):
            break
        mid = 0.5 * (lo + hi)
        if gap(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return optimize.brentq(gap, lo, hi, xtol=1e-14, rtol=8.9e-16)


def _credit_block(p: DsgeParams, rf: float):
    """Cutoff, leverage, and return on capital from the contract conditions.

    With a premium target, the contract first-order condition alone pins the
    cutoff (participation then gives leverage in closed form) and the entry
    transfer absorbs the retained-earnings condition downstream. Without one,
    the zero-transfer retained-earnings condition pins the contract
    multiplier pi_bar/(gamma_e rf) and everything follows from it.
    """
    if p.premium_target is not None:
        prem = p.premium_target**0.25  # annual ratio -> quarterly

        def gap(omega):
            con = bgg.contract(omega, p.sigma_omega, p.mu)
            denom = con["gamma_prime"] - p.mu * con["g_prime"]
            if denom <= 0:
                return np.inf  # multiplier diverges at the singularity
            lam_e = con["gamma_prime"] / denom
            return -((1.0 - con["gamma"]) * prem + lam_e * (con["lender_net"] * prem - 1.0))

        omega_bar = _find_root_scan(gap, 1e-6, 0.05, 1.15, 40.0, "contract cutoff")
        con = bgg.contract(omega_bar, p.sigma_omega, p.mu)
        share = con["lender_net"] * prem
        if share >= 1.0:
            raise SteadyStateError("premium target implies unbounded leverage")
        lev = 1.0 / (1.0 - share)
        rkg = prem * rf
        return float(omega_bar), float(lev), float(rkg)

    lam_target = p.pi_bar_c / (p.gamma_e * rf)
    if lam_target <= 1.0:
        raise SteadyStateError(
            "credit contract degenerate: pi_bar/(gamma_e rf) must exceed 1"
        )

    def gap(omega):
        # past the point where monitoring eats the lender's marginal share the
        # multiplier diverges; treat that region as +inf so bracketing stops
        gp = bgg.gamma_prime(omega, p.sigma_omega)
        denom = gp - p.mu * bgg.g_prime(omega, p.sigma_omega)
        if denom <= 0:
            return np.inf
        return gp / denom - lam_target

    omega_bar = _find_root_scan(gap, 1e-6, 0.05, 1.15, 40.0, "contract cutoff")
    con = bgg.contract(omega_bar, p.sigma_omega, p.mu)
    lev = 1.0 + lam_target * con["lender_net"] / (1.0 - con["gamma"])
    rkg = lam_target * rf / (lev * (1.0 - con["gamma"]))
    return float(omega_bar), float(lev), float(rkg)


def compute_steady_state(p: DsgeParams, tol: float = 1e-8) -> SteadyState:
    """Solve for the steady state and verify every residual against ``tol``."""
    pibar = p.pi_bar_c
    sbar = p.depreciation_trend
    rd = p.rd_ss
    rstar = p.rstar_ss
    rf = p.phi_split * rd + (1 - p.phi_split) * sbar * rstar

    ptil, disp, mc = _calvo_margins(p.theta, p.beta, p.epsilon, pibar)
    omega_bar, lev, rkg = _credit_block(p, rf)
    con = bgg.contract(omega_bar, p.sigma_omega, p.mu)
    zx = omega_bar * rkg * lev / (lev - 1.0)
    # retained earnings per unit of net worth; the entry transfer tops it up
    retained = p.gamma_e * (1.0 - con["gamma"]) * rkg * lev / pibar
    if p.premium_target is not None and retained >= 1.0:
        raise SteadyStateError(
            "premium target and payout imply self-financing entrepreneurs "
            "(retained earnings exceed net worth); lower premium_target"
        )

    normalize_q = p.ybar_f is None

    def build(u):
        lab, q, thsh = u
        if lab <= 0 or q <= 0 or not -1.0 < thsh < 1.0:
            return None
        inner = 1.0 - (1 - p.omega_c) * q ** (1 - p.eta_c)
        if inner <= 0:
            return None
        pd = (inner / p.omega_c) ** (1.0 / (1.0 - p.eta_c))
        p_i = (p.gamma_i * pd ** (1 - p.nu_i) + (1 - p.gamma_i) * q ** (1 - p.nu_i)) ** (
            1.0 / (1.0 - p.nu_i)
        )
        pk = p_i
        rk = pk * (rkg / pibar - (1.0 - p.delta))
        if rk <= 0:
            return None
        kl = (mc * pd * p.alpha / rk) ** (1.0 / (1.0 - p.alpha))
        w = mc * pd * (1 - p.alpha) * kl**p.alpha
        kcap = kl * lab
        ytil = kcap**p.alpha * lab ** (1 - p.alpha)
        y = ytil / disp
        inv = p.delta * kcap
        c = w / lab**p.varphi
        lam = 1.0 / c
        cd = p.omega_c * pd ** (-p.eta_c) * c
        cm = (1 - p.omega_c) * q ** (-p.eta_c) * c
        invd = p.gamma_i * (pd / p_i) ** (-p.nu_i) * inv
        invm = (1 - p.gamma_i) * (q / p_i) ** (-p.nu_i) * inv
        nw = pk * kcap / lev
        be = pk * kcap - nw
        bdol = (1 - p.phi_split) * be / q
        monitoring = p.mu * con["g"] * rkg * pk * kcap / pibar
        pdx = p.epsilon_x / (p.epsilon_x - 1.0) * pd / q
        px = (p.gamma_x * pdx ** (1 - p.eta_x) + (1 - p.gamma_x)) ** (1.0 / (1.0 - p.eta_x))
        xd = y - cd - invd - monitoring / pd
        if xd <= 0:
            return None
        xex = xd / (p.gamma_x * (pdx / px) ** (-p.eta_x))
        xm = (1 - p.gamma_x) * px**p.eta_x * xex
        imports = cm + invm + xm
        fstar = p.upsilon_cb * (rstar * bdol + imports)
        # sterilization-bond stock consistent with its law of motion; equals
        # the value of reserves when the steady state is UIP-consistent
        rd_real = rd / pibar
        bcb = (
            q * fstar * (1.0 - 2.0 * rstar + rd_real + p.tau_cb) / (1.0 - rd_real + p.tau_cb)
        )
        db = (p.phi_split * be + bcb) / (1.0 - thsh)
        bfstar = bdol  # banks fund the whole dollar leg abroad
        return dict(
            lab=lab, q=q, thsh=thsh, pd=pd, p_i=p_i, pk=pk, rk=rk, w=w,
            kcap=kcap, y=y, inv=inv, c=c, lam=lam, cd=cd, cm=cm, invd=invd,
            invm=invm, nw=nw, be=be, bdol=bdol, pdx=pdx, px=px, xd=xd,
            xex=xex, xm=xm, imports=imports, fstar=fstar, db=db, bfstar=bfstar, bcb=bcb,
        )

    def gaps(u):
        s = build(u)
        if s is None:
            return np.array([1e4, 1e4, 1e4])
        nfa = s["fstar"] + s["thsh"] * s["db"] / s["q"] - s["bfstar"]
        bop = (1.0 - rstar) * nfa - (s["px"] * s["xex"] - s["imports"])
        if normalize_q:
            scale_gap = s["q"] - 1.0
        else:
            scale_gap = s["xex"] * s["px"] ** p.eta_f - p.ybar_f
        foc = p.gamma_upsilon * (s["thsh"] - p.upsilon_share) - p.beta * (
            s["lam"] / pibar
        ) * (rd - sbar * rstar) * s["db"]
        return np.array([bop, scale_gap, foc])

    guess = np.array([0.9, 1.0, p.upsilon_share])
    sol = optimize.root(gaps, guess, tol=1e-13)
    if not sol.success or np.max(np.abs(gaps(sol.x))) > 1e-9:
        raise SteadyStateError(
            f"open economy block failed to converge: {sol.message}; "
            f"residuals {gaps(sol.x)}"
        )
    s = build(sol.x)
    yf = s["xex"] * s["px"] ** p.eta_f if normalize_q else p.ybar_f
    w_e = 0.0 if p.premium_target is None else (1.0 - retained) * s["nw"]

    x = np.empty(N_VARS)
    assign = {
        "c": s["c"], "lab": s["lab"], "lam": s["lam"], "w": s["w"], "rk": s["rk"],
        "y": s["y"], "kcap": s["kcap"], "inv": s["inv"], "pk": s["pk"], "pd": s["pd"],
        "q": s["q"], "p_i": s["p_i"], "pic": pibar, "pid": pibar, "ptil": ptil,
        "f1": s["lam"] * s["pd"] * mc * s["y"] / (1.0 - p.theta * p.beta * pibar**p.epsilon),
        "f2": s["lam"] * s["pd"] * s["y"] / (1.0 - p.theta * p.beta * pibar ** (p.epsilon - 1)),
        "disp": disp, "mc": mc, "rd": rd, "rstar": rstar, "yf": yf,
        "thsh": s["thsh"], "db": s["db"], "sdep": sbar, "phat": 1.0, "rkg": rkg,
        "omb": omega_bar, "lev": lev, "nw": s["nw"], "zx": zx, "be": s["be"],
        "bdol": s["bdol"], "fstar": s["fstar"], "fbar": s["fstar"], "bfstar": s["bfstar"],
        "xex": s["xex"], "xd": s["xd"], "xm": s["xm"], "px": s["px"], "pdx": s["pdx"],
        "pixd": 1.0, "rtilx": 1.0,
        "bcb": s["bcb"],
        "f1x": s["lam"] * s["pd"] * s["xd"] / (1.0 - p.theta_star * p.beta),
        "f2x": s["lam"] * s["q"] * s["xd"] / (1.0 - p.theta_star * p.beta),
        "dispx": 1.0, "cd": s["cd"], "cm": s["cm"], "invd": s["invd"], "invm": s["invm"],
    }
    for name, value in assign.items():
        x[VINDEX[name]] = value

    anchors = Anchors(
        rd=rd, rstar=rstar, yf=yf, y=s["y"], q=s["q"], w_e=w_e,
        bfstar=s["bfstar"], bh=s["thsh"] * s["db"] / s["q"], db=s["db"],
        bf_scale=4.0 * s["y"],
    )
    col = x[:, None]
    res = residuals(p, anchors, col, col, col, np.zeros((3, 1)))
    max_res = float(np.max(np.abs(res)))
    if max_res > tol:
        worst = int(np.argmax(np.abs(res[:, 0])))
        raise SteadyStateError(
            f"steady-state residual {max_res:.3e} exceeds {tol:.1e} "
            f"(worst equation index {worst}); residual vector: {res[:, 0]}"
        )
    if np.any(x[[VINDEX[n] for n in ("c", "lab", "y", "kcap", "inv", "nw", "fstar", "db")]] <= 0):
        raise SteadyStateError("steady state has non-positive quantities")
    return SteadyState(values=x, anchors=anchors, max_residual=max_res, entry_transfer=w_e)
