"""Calibration container for the small open economy model.

Defaults follow the quarterly calibration of the household/firm and
policy/foreign blocks (discount factor 0.9902, Calvo 0.75, capital share
0.40, 50/50 peso/dollar entrepreneur funding, inflation target 1.0025, ...)
with the frictions (kappa, mu, sigma_omega) and intervention-rule parameters
at their sign-restriction point estimates. Parameters the sources leave
unstated (export-sector elasticities, the dollar-deposit target, the reserve
target scale) default to mirrors of the domestic block or unit scales and
are all overridable.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace


class DsgeParamError(ValueError):
    pass


@dataclass(frozen=True)
class DsgeParams:
    # preferences and technology
    beta: float = 0.9902  # discount factor
    varphi: float = 2.0  # inverse Frisch elasticity
    gamma_upsilon: float = 100.0  # penalty on deposit-share deviations
    epsilon: float = 6.0  # elasticity between domestic varieties
    eta_c: float = 1.05  # consumption aggregator elasticity
    nu_i: float = 0.25  # investment aggregator elasticity
    omega_c: float = 0.70  # weight on the domestic good in consumption (home bias)
    gamma_i: float = 0.30  # weight on the domestic good in investment
    alpha: float = 0.40  # capital share
    delta: float = 0.02  # depreciation
    theta: float = 0.75  # domestic Calvo stickiness
    theta_star: float = 0.50  # export (dollar price) Calvo stickiness
    eta_f: float = 1.50  # foreign demand elasticity for exports
    eta_x: float = 2.50  # elasticity between export inputs
    gamma_x: float = 0.50  # weight on the domestic input in exports
    epsilon_x: float = 6.0  # elasticity between export varieties
    # financial block
    phi_split: float = 0.50  # peso share of entrepreneur debt
    mu: float = 0.25  # monitoring (bankruptcy) cost
    gamma_e: float = 0.90  # entrepreneur equity retained (1 - transfer share)
    sigma_omega: float = 0.22  # dispersion of the idiosyncratic capital shock
    kappa: float = 2.188  # investment adjustment cost curvature
    # policy
    pi_bar_c: float = 1.0025  # gross quarterly CPI inflation target
    r_pi: float = 1.5
    r_y: float = 0.005
    r_s: float = 0.02  # response to the detrended exchange-rate level
    rho_r: float = 0.75
    rho_fx: float = 0.102  # intervention-rule persistence of target deviations
    theta_rstar: float = 0.041  # intervention response to foreign-rate deviations
    vartheta: float = 0.80  # reserve-target smoothing
    upsilon_cb: float = 0.60  # reserve-target scale on gross dollar liabilities
    upsilon_share: float = 0.35  # household target share of dollar deposits
    # elasticity of banks' foreign funding spread to outstanding foreign
    # funding (per unit of annual output); disciplines the credit-side
    # external position
    chi_bf: float = 0.10
    # elasticity of the premium on households' foreign-currency return to
    # their dollar position (per unit of annual output)
    chi_h: float = 0.15
    # marginal deposit-management cost per unit of deposits above steady
    # state (relative to annual output); tilts the saving margin so that
    # household wealth mean-reverts instead of sitting on a unit root
    xi_db: float = 0.25
    # speed at which the central bank's quasi-fiscal levy retires
    # sterilization bonds in excess of the value of reserves; must exceed
    # rd/pi - 1 for the bond stock to be stationary
    tau_cb: float = 0.25
    # foreign block
    a11: float = 0.942
    a12: float = -0.908  # effect of the lagged rate deviation on foreign demand
    a21: float = 0.015
    a22: float = 0.955
    sigma_ystar: float = 0.01
    sigma_rstar: float = 0.0014
    c21: float = 0.0
    # steady-state targets; None = derived (UIP-consistent rate, unit RER)
    rstar_bar: float | None = None
    ybar_f: float | None = None
    psi: float | None = None  # gross nominal depreciation trend; must equal pi_bar_c
    # gross annual external finance premium E[Rk]/Rf targeted in steady state;
    # the entrepreneur entry transfer adjusts residually to support it. None
    # instead forces a zero entry transfer and lets the premium follow from
    # the retained-earnings condition alone (explosive for large payouts).
    premium_target: float | None = 1.02

    def __post_init__(self):
        if not 0 < self.beta < 1:
            raise DsgeParamError("beta must lie in (0, 1)")
        if not 0 < self.delta <= 1:
            raise DsgeParamError("delta must lie in (0, 1]")
        for name in ("theta", "theta_star"):
            v = getattr(self, name)
            if not 0 <= v < 1:
                raise DsgeParamError(f"{name} must lie in [0, 1)")
        for name in ("epsilon", "epsilon_x"):
            if getattr(self, name) <= 1:
                raise DsgeParamError(f"{name} must exceed 1")
        if not self.omega_c > 0.5:
            raise DsgeParamError("omega_c must exceed 0.5 (home bias in consumption)")
        if not self.gamma_i < 0.5:
            raise DsgeParamError("gamma_i must be below 0.5 (import-heavy investment)")
        if self.sigma_omega <= 0:
            raise DsgeParamError("sigma_omega must be positive")
        if not 0 <= self.mu < 1:
            raise DsgeParamError("mu must lie in [0, 1)")
        if not 0 < self.gamma_e <= 1:
            raise DsgeParamError("gamma_e must lie in (0, 1]")
        if not 0 < self.phi_split <= 1:
            raise DsgeParamError("phi_split must lie in (0, 1]")
        if not 0 < self.upsilon_share < 1:
            raise DsgeParamError("upsilon_share must lie in (0, 1)")
        if self.kappa < 0:
            raise DsgeParamError("kappa must be non-negative")
        if not 0 <= self.vartheta < 1:
            raise DsgeParamError("vartheta must lie in [0, 1)")
        if self.pi_bar_c <= 0:
            raise DsgeParamError("pi_bar_c must be positive")
        if self.psi is not None and abs(self.psi - self.pi_bar_c) > 1e-12:
            raise DsgeParamError(
                "psi (nominal depreciation trend) must equal pi_bar_c: foreign "
                "prices are constant, so any other trend detaches the rule target"
            )
        if self.premium_target is not None and self.premium_target <= 1.0:
            raise DsgeParamError("premium_target is a gross annual ratio and must exceed 1")
        if self.chi_bf < 0 or self.chi_h < 0 or self.xi_db < 0:
            raise DsgeParamError("chi_bf, chi_h, and xi_db must be non-negative")

    # derived steady-state anchors -------------------------------------

    @property
    def depreciation_trend(self) -> float:
        """Gross trend depreciation of the nominal exchange rate."""
        return self.pi_bar_c

    @property
    def rd_ss(self) -> float:
        """Steady-state gross deposit rate from the household Euler equation."""
        return self.pi_bar_c / self.beta

    @property
    def rstar_ss(self) -> float:
        """Steady-state foreign rate; defaults to the UIP-consistent level."""
        if self.rstar_bar is not None:
            return self.rstar_bar
        return self.rd_ss / self.depreciation_trend

    def override(self, **kwargs) -> "DsgeParams":
        unknown = set(kwargs) - {f.name for f in fields(self)}
        if unknown:
            raise DsgeParamError(f"unknown parameter(s): {sorted(unknown)}")
        return replace(self, **kwargs)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


PARAM_NAMES = tuple(f.name for f in fields(DsgeParams))

# parameters that leave the non-stochastic steady state unchanged
STEADY_IRRELEVANT = frozenset(
    {
        "kappa", "rho_r", "r_pi", "r_y", "r_s",
        "a11", "a12", "a21", "a22", "sigma_ystar", "sigma_rstar", "c21",
        "rho_fx", "theta_rstar", "vartheta",
    }
)


def steady_cache_key(p: DsgeParams) -> tuple:
    return tuple(
        getattr(p, f.name) for f in fields(DsgeParams) if f.name not in STEADY_IRRELEVANT
    )
