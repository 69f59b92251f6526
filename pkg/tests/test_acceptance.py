"""Acceptance suite: every exit criterion at its stated tolerance.

Each test prints one pass/fail line through the terminal-summary hook. The
headline statistics of the source data depend on a proprietary event file;
when the environment variable SPILLOVER_EVENTS_CSV points at it, the
tabulation criterion also checks the published cell counts, otherwise the
bundled synthetic fixture is checked against its generator manifest.
"""

import json
import os
import time
from pathlib import Path

import numpy as np
from scipy import integrate, stats

from spillover import bvar, identify, ingest, irfmatch, synth
from spillover.cli import main as cli_main
from spillover.dsge import DsgeParams, bgg, compute_steady_state, solve_model
from spillover.dsge.model import VINDEX
from spillover.eventstudy import tabulate_events

from conftest import record

FIXTURES = Path(__file__).parent / "fixtures"


def test_event_tabulation():
    t0 = time.time()
    events = ingest.load_events(FIXTURES / "events_synth.csv")
    manifest = json.loads((FIXTURES / "events_synth_manifest.json").read_text())
    table = tabulate_events(events)
    ok = table.cells.tolist() == manifest["cells"] and table.total == manifest["total"]
    external = os.environ.get("SPILLOVER_EVENTS_CSV")
    detail = f"synthetic fixture, total {table.total}"
    if external and Path(external).exists():
        published = tabulate_events(ingest.load_events(external))
        ok = ok and published.cells.tolist() == [[27, 26, 36], [39, 14, 12]]
        ok = ok and published.total == 154
        detail += "; public dataset reproduces the published cells"
    elapsed = time.time() - t0
    ok = ok and elapsed < 1.0
    record("event tabulation", ok, detail + f", {elapsed:.2f}s")
    assert ok


def test_sign_restriction_soundness():
    t0 = time.time()
    truth = synth.true_var(n_macro=2, n_surprise=2, seed=5)
    panel, _ = synth.make_panel(truth, n_months=700, seed=11)
    draws = bvar.fit_posterior(panel, bvar.VarConfig(n_lags=2, n_surprise=2, n_draws=1100, seed=0))
    result = identify.identify_all(draws, "sign", seed=1)
    n_acc = len(result.draws)
    sign_ok = all(
        sd.impact[0, 0] > 0 and sd.impact[1, 0] < 0 and sd.impact[0, 1] > 0 and sd.impact[1, 1] > 0
        for sd in result.draws
    )
    recon = max(
        float(np.max(np.abs(sd.impact @ sd.impact.T - sd.parent.sigma))) for sd in result.draws
    )
    elapsed = time.time() - t0
    ok = n_acc >= 1000 and sign_ok and recon < 1e-10 and elapsed < 60
    record(
        "sign-restriction soundness",
        ok,
        f"{n_acc} accepted, max reconstruction error {recon:.1e}, {elapsed:.1f}s",
    )
    assert ok


def test_fevd_normalization():
    truth = synth.true_var(n_macro=2, n_surprise=2, seed=5)
    panel, _ = synth.make_panel(truth, n_months=600, seed=4)
    draws = bvar.fit_posterior(panel, bvar.VarConfig(n_lags=2, n_surprise=2, n_draws=60, seed=2))
    worst = 0.0
    bounds_ok = True
    for scheme in ("sign", "cholesky"):
        for sd in identify.identify_all(draws, scheme, seed=3).draws:
            for h in (1, 12, 24):
                shares = identify.fevd(sd, h)
                worst = max(worst, float(np.max(np.abs(shares.sum(axis=1) - 1.0))))
                bounds_ok = bounds_ok and bool(
                    np.all(shares >= -1e-12) and np.all(shares <= 1 + 1e-12)
                )
    ok = worst < 1e-10 and bounds_ok
    record("FEVD normalization", ok, f"worst |sum - 1| = {worst:.1e}")
    assert ok


def test_var_recovery_oracle():
    t0 = time.time()
    truth = synth.true_var(n_macro=2, n_surprise=2, seed=5)
    panel, _ = synth.make_panel(truth, n_months=2000, seed=11)
    draws = bvar.fit_posterior(panel, bvar.VarConfig(n_lags=2, n_surprise=2, n_draws=600, seed=42))
    stack = np.stack([d.coeffs for d in draws])
    free = np.zeros(truth.coeffs.shape, dtype=bool)
    free[:, truth.n_surprise :, :] = True
    rmse = float(np.sqrt(np.mean((stack.mean(axis=0) - truth.coeffs)[free] ** 2)))
    lo = np.quantile(stack, 0.005, axis=0)
    hi = np.quantile(stack, 0.995, axis=0)
    coverage = float(np.mean((truth.coeffs[free] >= lo[free]) & (truth.coeffs[free] <= hi[free])))
    elapsed = time.time() - t0
    ok = rmse < 0.05 and coverage >= 0.95 and elapsed < 120
    record(
        "VAR recovery oracle", ok, f"RMSE {rmse:.4f}, 99% coverage {coverage:.2%}, {elapsed:.1f}s"
    )
    assert ok


def test_structural_irf_oracle():
    truth = synth.true_var(n_macro=2, n_surprise=2, seed=5)
    panel, _ = synth.make_panel(truth, n_months=600, seed=8)
    draws = bvar.fit_posterior(panel, bvar.VarConfig(n_lags=2, n_surprise=2, n_draws=8, seed=5))
    h_max = 24
    worst = 0.0
    for scheme in ("sign", "cholesky"):
        for sd in identify.identify_all(draws, scheme, seed=6).draws:
            resp = identify.structural_irf(sd, h_max)
            parent = sd.parent
            n, p = parent.n_vars, parent.n_lags
            for j in range(n):
                hist = np.zeros((h_max + p + 1, n))
                hist[p] = sd.impact[:, j]
                for t in range(p + 1, h_max + p + 1):
                    acc = np.zeros(n)
                    for lag in range(p):
                        acc += parent.coeffs[lag] @ hist[t - 1 - lag]
                    hist[t] = acc
                worst = max(worst, float(np.max(np.abs(resp[j].T - hist[p:]))))
    ok = worst < 1e-10
    record("structural IRF oracle", ok, f"max |IRF - simulation| = {worst:.1e}")
    assert ok


def test_dsge_steady_state_and_solution():
    t0 = time.time()
    params = DsgeParams()
    steady = compute_steady_state(params)
    solved = solve_model(params)
    a = solved.irf_states("eps_rstar", 24, size=1.0)
    b = solved.irf_states("eps_rstar", 24, size=2.0)
    lin_err = float(np.max(np.abs(b - 2.0 * a)) / max(np.max(np.abs(a)), 1e-300))
    elapsed = time.time() - t0
    # the root-count condition is enforced inside solve_model, which raises
    # on any mismatch, so reaching this point certifies it
    ok = (
        steady.max_residual < 1e-8
        and solved.space.stable
        and solved.space.n_stable > 0
        and lin_err < 1e-10
        and elapsed < 10
    )
    record(
        "DSGE steady state and solution",
        ok,
        f"residual {steady.max_residual:.1e}, radius {solved.space.spectral_radius:.3f}, "
        f"linearity {lin_err:.1e}, {elapsed:.1f}s",
    )
    assert ok


def test_bgg_quadrature_oracle():
    sigma = 0.22
    scale = np.exp(-0.5 * sigma**2)
    worst = 0.0
    for omega_bar in (0.3, 0.5, 0.8):
        f_quad, _ = integrate.quad(
            lambda w: stats.lognorm.pdf(w, s=sigma, scale=scale), 0.0, omega_bar
        )
        g_quad, _ = integrate.quad(
            lambda w: w * stats.lognorm.pdf(w, s=sigma, scale=scale), 0.0, omega_bar
        )
        gamma_quad = g_quad + omega_bar * (1.0 - f_quad)
        worst = max(
            worst,
            abs(bgg.cdf(omega_bar, sigma) - f_quad),
            abs(bgg.partial_expectation(omega_bar, sigma) - g_quad),
            abs(bgg.lender_gross_share(omega_bar, sigma) - gamma_quad),
        )
    ok = worst < 1e-6
    record("BGG quadrature oracle", ok, f"max deviation {worst:.1e}")
    assert ok


def test_foreign_block_restriction():
    solved = solve_model(DsgeParams())
    impact = abs(float(solved.irf_states("eps_rstar", 1)[0, VINDEX["yf"]]))
    ok = impact < 1e-14
    record("foreign block impact restriction", ok, f"|y* impact| = {impact:.1e}")
    assert ok


def test_irf_matching_self_recovery():
    t0 = time.time()
    theta_star = dict(
        sigma_rstar=0.0014, a22=0.955, kappa=2.188, mu=0.240,
        sigma_omega=0.233, rho_fx=0.102, theta_rstar=0.041,
    )
    base = DsgeParams()
    solved = solve_model(base.override(**theta_star))
    irfs = solved.irf_observables("eps_rstar", 11)
    variables = list(irfmatch.DEFAULT_VARIABLE_MAP)
    means = np.vstack([irfs[irfmatch.DEFAULT_VARIABLE_MAP[v]] for v in variables])
    scale = np.maximum(np.abs(means).max(axis=1, keepdims=True) * 0.10, 1e-4)
    target = irfmatch.MatchTarget(tuple(variables), means, np.tile(scale**2, (1, 12)))
    problem = irfmatch.EstimationProblem(target=target, fixed_params=base)
    result = irfmatch.estimate(problem, n_starts=8, seed=0, maxiter=400)
    rel = {
        n: abs(v - theta_star[n]) / abs(theta_star[n])
        for n, v in zip(result.names, result.estimates)
    }
    elapsed = time.time() - t0
    ok = max(rel.values()) < 0.05 and result.objective < 1e-4 and elapsed < 600
    record(
        "IRF-matching self-recovery",
        ok,
        f"max rel err {max(rel.values()):.2%}, objective {result.objective:.1e}, {elapsed:.0f}s",
    )
    assert ok


def test_end_to_end_synthetic_pipeline(tmp_path):
    t0 = time.time()
    out = tmp_path / "run"
    assert cli_main(["simulate", "--out", str(out), "--seed", "3"]) == 0
    var_cfg = tmp_path / "var.toml"
    var_cfg.write_text(
        f'[var]\npanel = "{out / "panel_synth.csv"}"\nn_lags = 2\nn_surprise = 2\ndraws = 150\n',
        encoding="utf-8",
    )
    assert cli_main(["var", "--config", str(var_cfg), "--out", str(out), "--seed", "7"]) == 0
    assert cli_main([
        "irf", "--posterior", str(out / "posterior.npz"), "--scheme", "sign",
        "--out", str(out), "--seed", "1", "--horizon", "36",
    ]) == 0
    match_cfg = tmp_path / "match.toml"
    match_cfg.write_text(
        "[match]\n"
        'free = ["kappa", "rho_fx"]\n'
        "starts = 2\nmaxiter = 120\n"
        "[match.variable_map]\n"
        'macro0 = "output"\nmacro1 = "cpi"\n',
        encoding="utf-8",
    )
    code = cli_main([
        "match", "--config", str(match_cfg), "--targets", str(out / "irf_moments_sign.csv"),
        "--out", str(out),
    ])
    elapsed = time.time() - t0
    ok = code == 0 and (out / "estimates.json").exists() and (out / "fit.csv").exists()
    ok = ok and elapsed < 600
    record("end-to-end synthetic pipeline", ok, f"simulate->var->irf->match in {elapsed:.0f}s")
    assert ok


def test_determinism_across_thread_counts(tmp_path, monkeypatch):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli_main(["simulate", "--out", str(out1), "--seed", "9"]) == 0
    assert cli_main(["simulate", "--out", str(out2), "--seed", "9"]) == 0
    cfg = tmp_path / "var.toml"
    cfg.write_text(
        f'[var]\npanel = "{out1 / "panel_synth.csv"}"\nn_lags = 2\nn_surprise = 2\ndraws = 60\n',
        encoding="utf-8",
    )
    monkeypatch.setenv("SPILLOVER_THREADS", "1")
    assert cli_main(["var", "--config", str(cfg), "--out", str(out1), "--seed", "5"]) == 0
    assert cli_main([
        "irf", "--posterior", str(out1 / "posterior.npz"), "--scheme", "sign",
        "--out", str(out1), "--seed", "2", "--horizon", "18",
    ]) == 0
    monkeypatch.setenv("SPILLOVER_THREADS", "6")
    assert cli_main(["var", "--config", str(cfg), "--out", str(out2), "--seed", "5"]) == 0
    assert cli_main([
        "irf", "--posterior", str(out2 / "posterior.npz"), "--scheme", "sign",
        "--out", str(out2), "--seed", "2", "--horizon", "18",
    ]) == 0
    pairs = [
        ("panel_synth.csv", "panel_synth.csv"),
        ("irf_sign.csv", "irf_sign.csv"),
        ("irf_moments_sign.csv", "irf_moments_sign.csv"),
        ("fevd_sign.csv", "fevd_sign.csv"),
    ]
    ok = all((out1 / a).read_bytes() == (out2 / b).read_bytes() for a, b in pairs)
    record("determinism across thread counts", ok, f"{len(pairs)} artifacts byte-identical")
    assert ok
