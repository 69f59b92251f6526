"""Command-line pipeline.

Each subcommand is a pure function of (config file, input files, seed) to
output files in --out. Configs are TOML; the most common settings can be
overridden by flags. `simulate` generates the synthetic fixtures the rest of
the pipeline can be exercised with, so an end-to-end run needs no external
data.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import artifacts, bvar, eventstudy, identify, ingest, irfmatch, synth
from .dsge import DsgeParams, solve_model
from .dsge.model import SHOCKS


def load_config(path) -> dict:
    if path is None:
        return {}
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _parse_trim(text):
    lo, hi = (float(v) for v in text.split(","))
    return lo, hi


# events --------------------------------------------------------------------

def cmd_events(args) -> int:
    cfg = load_config(args.config).get("events", {})
    path = args.input or cfg.get("path")
    if not path or not Path(path).exists():
        print(f"events: input file not found: {path!r}", file=sys.stderr)
        return 2
    out = _out_dir(args)
    trim = _parse_trim(args.trim) if args.trim else cfg.get("trim")
    events = ingest.load_events(path, cfg.get("countries"))

    table = eventstudy.tabulate_events(events)
    artifacts.write_tabulation(out / "events_tabulation.csv", out / "events_tabulation.txt", table)

    classes = {
        "total": None,
        "negative_comovement": eventstudy.EventClass.NEGATIVE_COMOVEMENT,
        "positive_comovement": eventstudy.EventClass.POSITIVE_COMOVEMENT,
    }
    header = ["mean", "p10", "p25", "p50", "p75", "p90", "sd"]
    stats_rows, corr_rows = {}, {}
    for label, cls in classes.items():
        try:
            stats_rows[label] = eventstudy.depreciation_stats(events, cls, trim).as_row()
        except ValueError:
            continue
        try:
            corr = eventstudy.comovement_correlation(events, cls)
            corr_rows[label] = [corr.corr, corr.p_value, float(corr.n)]
        except ValueError:
            pass
    artifacts.write_stats_table(out / "depreciation_stats.csv", stats_rows, header)
    artifacts.write_stats_table(out / "correlations.csv", corr_rows, ["correlation", "p_value", "n"])

    neg = eventstudy.pooled_depreciations(events, eventstudy.EventClass.NEGATIVE_COMOVEMENT)
    pos = eventstudy.pooled_depreciations(events, eventstudy.EventClass.POSITIVE_COMOVEMENT)
    if neg.size >= 2 and pos.size >= 2:
        test = eventstudy.mean_diff_test(neg, pos)
        artifacts.write_stats_table(
            out / "mean_diff_test.csv",
            {"negative_vs_positive": [test.t_stat, test.p_value, test.mean_a, test.mean_b]},
            ["t_stat", "p_value", "mean_negative", "mean_positive"],
        )

    artifacts.write_scatter(
        out / "scatter_rate_stock.csv",
        ["date", "d_rate", "d_stock", "event_class"],
        [
            (e.date.isoformat(), e.d_rate, e.d_stock, eventstudy.classify_event(e).value)
            for e in events
        ],
    )
    artifacts.write_scatter(
        out / "scatter_rate_ner.csv",
        ["date", "country", "d_rate", "ner_change", "event_class"],
        [
            (e.date.isoformat(), c, e.d_rate, v, eventstudy.classify_event(e).value)
            for e in events
            for c, v in sorted(e.ner_change.items())
        ],
    )
    outputs = sorted(str(p) for p in out.glob("*.csv"))
    artifacts.write_manifest(out, "events", {"path": str(path), "trim": trim}, None, [path], outputs)
    print(f"events: wrote {len(outputs)} tables to {out}")
    return 0


def cmd_plot_data(args) -> int:
    # scatter emission only; same inputs as `events`
    return cmd_events(args)


# simulate --------------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = load_config(args.config).get("simulate", {})
    out = _out_dir(args)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    n_months = int(cfg.get("n_months", 360))

    events, ev_manifest = synth.make_events(seed=20140301 + seed)
    synth.write_events_csv(out / "events_synth.csv", events)
    synth.write_manifest_json(out / "events_synth_manifest.json", ev_manifest)

    truth = synth.true_var(n_macro=int(cfg.get("n_macro", 2)), seed=5 + seed)
    panel, panel_manifest = synth.make_panel(truth, n_months=n_months, seed=11 + seed)
    panel.to_csv(out / "panel_synth.csv")
    synth.write_manifest_json(out / "panel_synth_manifest.json", panel_manifest)
    print(f"simulate: wrote synthetic events ({len(events)}) and panel ({n_months} months) to {out}")
    return 0


# var -------------------------------------------------------------------------

def _panel_from_config(cfg: dict, n_surprise: int) -> ingest.MonthlyPanel:
    if "panel" in cfg:
        panel = ingest.MonthlyPanel.from_csv(cfg["panel"])
        cols = [
            ingest.VariableInfo(c.name, "surprise" if i < n_surprise else c.role, c.transform)
            for i, c in enumerate(panel.columns)
        ]
        return ingest.MonthlyPanel(panel.start_month, panel.values, cols)
    events = ingest.load_events(cfg["events"])
    specs = [
        ingest.SeriesSpec(
            name=s["name"],
            path=s["path"],
            column=s.get("column", s["name"]),
            transform=s.get("transform", "level"),
            role=s.get("role", "em_macro"),
        )
        for s in cfg.get("series", [])
    ]
    span = None
    if "span" in cfg:
        span = (ingest.parse_month(cfg["span"][0]), ingest.parse_month(cfg["span"][1]))
    return ingest.assemble_var_panel(events, specs, span)


def cmd_var(args) -> int:
    cfg = load_config(args.config).get("var", {})
    out = _out_dir(args)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    n_surprise = int(cfg.get("n_surprise", 2))
    var_cfg = bvar.VarConfig(
        n_lags=int(cfg.get("n_lags", 12)),
        n_surprise=n_surprise,
        lambda1=float(cfg.get("lambda1", 0.2)),
        lambda2=float(cfg.get("lambda2", 0.5)),
        lambda3=float(cfg.get("lambda3", 1.0)),
        lambda4=float(cfg.get("lambda4", 100.0)),
        n_draws=int(args.draws or cfg.get("draws", 1000)),
        seed=seed,
    )
    panel = _panel_from_config(cfg, n_surprise)
    draws = bvar.fit_posterior(panel, var_cfg)
    path = out / "posterior.npz"
    config_dict = {**cfg, "n_draws": var_cfg.n_draws, "seed": seed}
    artifacts.save_posterior(path, draws, config_dict, seed)
    inputs = [cfg[k] for k in ("panel", "events") if k in cfg]
    artifacts.write_manifest(out, "var", config_dict, seed, inputs, [path])
    print(f"var: {var_cfg.n_draws} posterior draws on {panel.n_vars} variables -> {path}")
    return 0


# irf / fevd --------------------------------------------------------------------

def _identified(args, cfg) -> tuple[identify.IdentificationResult, list, dict]:
    posterior_path = args.posterior or cfg.get("posterior")
    draws, meta = artifacts.load_posterior(posterior_path)
    spec = identify.SignRestrictionSpec(
        rate_index=int(cfg.get("rate_index", 0)),
        stock_index=int(cfg.get("stock_index", 1)),
        max_attempts=int(cfg.get("max_attempts", 1000)),
    )
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    result = identify.identify_all(draws, args.scheme, spec, seed=seed)
    return result, draws, meta


def cmd_irf(args) -> int:
    cfg = load_config(args.config).get("irf", {})
    out = _out_dir(args)
    horizon = int(args.horizon or cfg.get("horizon", 36))
    result, draws, meta = _identified(args, cfg)
    if not result.draws:
        print("irf: no accepted identification draws", file=sys.stderr)
        return 3
    irfs = identify.collect_irfs(result.draws, horizon)
    scheme = args.scheme
    half = (1.0 - args.bands / 100.0) / 2.0
    probs = (half, 0.5, 1.0 - half)
    irf_path = out / f"irf_{scheme}.csv"
    artifacts.write_irf_csv(irf_path, scheme, irfs, probs=probs)
    moments_path = out / f"irf_moments_{scheme}.csv"
    artifacts.write_irf_moments_csv(moments_path, scheme, irfs, shock=identify.PURE_MP)
    fevd_h = int(cfg.get("fevd_horizon", 24))
    shares = np.mean([identify.fevd(sd, fevd_h) for sd in result.draws], axis=0)
    fevd_path = out / f"fevd_{scheme}.csv"
    artifacts.write_fevd_csv(fevd_path, scheme, shares, irfs.variable_names, irfs.shock_labels, fevd_h)
    config_dict = {**cfg, "scheme": scheme, "horizon": horizon, "band_coverage": args.bands}
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    artifacts.write_manifest(
        out, f"irf_{scheme}",
        {**config_dict, "acceptance_rate": result.acceptance_rate},
        seed, [args.posterior or cfg.get("posterior")], [irf_path, moments_path, fevd_path],
    )
    print(
        f"irf: scheme={scheme} accepted {len(result.draws)}/{result.attempted} "
        f"(rate {result.acceptance_rate:.2f}) -> {irf_path}"
    )
    return 0


def cmd_fevd(args) -> int:
    cfg = load_config(args.config).get("fevd", load_config(args.config).get("irf", {}))
    out = _out_dir(args)
    horizon = int(args.horizon or cfg.get("horizon", 24))
    result, _, _ = _identified(args, cfg)
    if not result.draws:
        print("fevd: no accepted identification draws", file=sys.stderr)
        return 3
    names = result.draws[0].parent.names
    shares = np.mean([identify.fevd(sd, horizon) for sd in result.draws], axis=0)
    path = out / f"fevd_{args.scheme}.csv"
    artifacts.write_fevd_csv(path, args.scheme, shares, names, result.draws[0].shock_labels, horizon)
    print(f"fevd: scheme={args.scheme} horizon={horizon} -> {path}")
    return 0


# dsge -----------------------------------------------------------------------

def _params_from_config(cfg: dict) -> DsgeParams:
    return DsgeParams().override(**cfg.get("parameters", {}))


def cmd_dsge(args) -> int:
    cfg = load_config(args.config).get("dsge", {})
    out = _out_dir(args)
    params = _params_from_config(cfg)
    horizon = int(args.horizon or cfg.get("horizon", 12))
    shock = cfg.get("shock", "eps_rstar")
    if shock not in SHOCKS:
        print(f"dsge: unknown shock {shock!r}; choose from {SHOCKS}", file=sys.stderr)
        return 2
    solved = solve_model(params)
    irfs = solved.irf_observables(shock, horizon - 1)
    path = out / "model_irf.csv"
    artifacts.write_model_irf_csv(path, irfs, shock)
    steady_path = out / "steady_state.json"
    steady_path.write_text(
        json.dumps(
            {
                "steady_state": solved.steady.as_dict(),
                "max_residual": solved.steady.max_residual,
                "entry_transfer": solved.steady.entry_transfer,
                "spectral_radius": solved.space.spectral_radius,
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    artifacts.write_manifest(out, "dsge", cfg, None, [], [path, steady_path])
    print(f"dsge: solved (radius {solved.space.spectral_radius:.4f}) -> {path}")
    return 0


# match -----------------------------------------------------------------------

def cmd_match(args) -> int:
    cfg = load_config(args.config)
    match_cfg = cfg.get("match", {})
    out = _out_dir(args)
    targets_path = args.targets or match_cfg.get("targets")
    if not targets_path or not Path(targets_path).exists():
        print(f"match: targets file not found: {targets_path!r}", file=sys.stderr)
        return 2
    variables, means, variances = artifacts.read_irf_moments(targets_path)
    variable_map = match_cfg.get("variable_map", dict(irfmatch.DEFAULT_VARIABLE_MAP))
    keep = [i for i, v in enumerate(variables) if v in variable_map]
    if not keep:
        print("match: no target variable maps to a model observable", file=sys.stderr)
        return 2
    target = irfmatch.MatchTarget(
        tuple(variables[i] for i in keep), means[keep], np.maximum(variances[keep], 1e-12)
    )
    bounds = dict(irfmatch.DEFAULT_BOUNDS)
    bounds.update({k: tuple(v) for k, v in match_cfg.get("bounds", {}).items()})
    problem = irfmatch.EstimationProblem(
        target=target,
        fixed_params=_params_from_config(cfg.get("dsge", {})),
        free_names=tuple(match_cfg.get("free", irfmatch.FREE_PARAMETERS)),
        bounds=bounds,
        variable_map=variable_map,
    )
    seed = args.seed if args.seed is not None else match_cfg.get("seed", 0)
    result = irfmatch.estimate(
        problem,
        n_starts=int(match_cfg.get("starts", 8)),
        seed=seed,
        maxiter=int(match_cfg.get("maxiter", 400)),
    )
    est_path = out / "estimates.json"
    est_path.write_text(json.dumps(result.as_dict(), indent=2) + "\n", encoding="utf-8")
    model_vals = irfmatch.model_moments(problem, result.estimates)
    fit_path = out / "fit.csv"
    artifacts.write_fit_csv(
        fit_path, target.variables, list(range(target.n_quarters)),
        target.means, target.variances, model_vals,
    )
    artifacts.write_manifest(out, "match", match_cfg, seed, [targets_path], [est_path, fit_path])
    print(f"match: objective {result.objective:.3e} -> {est_path}")
    return 0


# entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spillover",
        description="event studies, sign-restricted VARs, and a small open economy model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scheme=False, horizon=False, posterior=False, targets=False, inp=False):
        p.add_argument("--config", help="TOML configuration file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None)
        if inp:
            p.add_argument("--input", help="input CSV path (overrides config)")
            p.add_argument("--trim", help="percentile trim 'lo,hi' for the stats tables")
        if scheme:
            p.add_argument("--scheme", choices=["sign", "cholesky"], default="sign")
            p.add_argument("--bands", type=int, choices=[68, 90], default=68,
                           help="credible band coverage for the quantile columns")
        if horizon:
            p.add_argument("--horizon", type=int, default=None)
        if posterior:
            p.add_argument("--posterior", help="posterior .npz artifact")
        if targets:
            p.add_argument("--targets", help="irf moment or band CSV with target IRFs")

    common(sub.add_parser("events", help="event classification and statistics tables"), inp=True)
    common(sub.add_parser("plot-data", help="emit scatter data files for plotting"), inp=True)
    common(sub.add_parser("simulate", help="generate synthetic events and panel fixtures"))
    p_var = sub.add_parser("var", help="estimate the restricted VAR posterior")
    common(p_var)
    p_var.add_argument("--draws", type=int, default=None)
    common(sub.add_parser("irf", help="identify shocks and emit IRF/FEVD tables"),
           scheme=True, horizon=True, posterior=True)
    common(sub.add_parser("fevd", help="forecast error variance decomposition"),
           scheme=True, horizon=True, posterior=True)
    common(sub.add_parser("dsge", help="solve the structural model and emit IRFs"), horizon=True)
    common(sub.add_parser("match", help="IRF-matching estimation"), targets=True)
    return parser


HANDLERS = {
    "events": cmd_events,
    "plot-data": cmd_plot_data,
    "simulate": cmd_simulate,
    "var": cmd_var,
    "irf": cmd_irf,
    "fevd": cmd_fevd,
    "dsge": cmd_dsge,
    "match": cmd_match,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return HANDLERS[args.command](args)
    except (ingest.IngestError, bvar.BvarError, identify.IdentifyError, irfmatch.MatchError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
