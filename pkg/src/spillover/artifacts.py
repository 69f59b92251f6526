"""File artifacts and their schemas.

Every compute step reads and writes plain CSV/JSON/NPZ files so stages can
run as separate processes. Numeric CSV cells are written with ``repr`` so a
reload is bit-exact, and each run directory carries a manifest recording the
configuration hash, seed, package versions, and input digests that produced
it. Timestamps live only in the manifest; the numeric outputs of a rerun
with the same configuration and seed are byte-identical.
"""

from __future__ import annotations

import csv
import datetime
import hashlib
import json
from pathlib import Path

import numpy as np

from .bvar import PosteriorDraw
from .identify import IrfSet


def _fmt(value) -> str:
    return repr(float(value))


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()[:16]


def write_manifest(out_dir, command: str, config: dict, seed, inputs=(), outputs=()):
    out_dir = Path(out_dir)
    manifest = {
        "command": command,
        "config_hash": config_hash(config),
        "seed": seed,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "versions": {"numpy": np.__version__},
        "inputs": {str(p): file_digest(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
    }
    path = out_dir / f"{command}_manifest.json"
    path.write_text(json.dumps(manifest, indent=2, default=str) + "\n", encoding="utf-8")
    return path


# posterior draw artifacts -------------------------------------------------

def save_posterior(path, draws: list[PosteriorDraw], config: dict, seed) -> None:
    """Pack a posterior sample into one .npz with an embedded manifest."""
    if not draws:
        raise ValueError("no draws to save")
    meta = {
        "config_hash": config_hash(config),
        "seed": seed,
        "n_draws": len(draws),
        "n_surprise": draws[0].n_surprise,
        "names": list(draws[0].names),
        "config": config,
    }
    np.savez_compressed(
        path,
        coeffs=np.stack([d.coeffs for d in draws]),
        const=np.stack([d.const for d in draws]),
        sigma=np.stack([d.sigma for d in draws]),
        meta=json.dumps(meta, default=str),
    )


def load_posterior(path) -> tuple[list[PosteriorDraw], dict]:
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        coeffs, const, sigma = data["coeffs"], data["const"], data["sigma"]
    names = tuple(meta["names"])
    draws = [
        PosteriorDraw(coeffs[i], const[i], sigma[i], meta["n_surprise"], names)
        for i in range(meta["n_draws"])
    ]
    return draws, meta


# IRF / FEVD tables ---------------------------------------------------------

def write_irf_csv(path, scheme: str, irfs: IrfSet, probs=(0.16, 0.5, 0.84)) -> None:
    """Long-format pointwise quantile bands: one row per shock/variable/horizon."""
    bands = np.quantile(irfs.responses, probs, axis=0)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scheme", "shock", "variable", "horizon", "q16", "q50", "q84"])
        for j, shock in enumerate(irfs.shock_labels):
            for i, var in enumerate(irfs.variable_names):
                for h in range(irfs.responses.shape[3]):
                    writer.writerow(
                        [scheme, shock, var, h] + [_fmt(bands[k, j, i, h]) for k in range(3)]
                    )


def write_irf_moments_csv(path, scheme: str, irfs: IrfSet, shock: str, n_quarters: int = 12) -> None:
    """Quarterly means and pointwise variances across draws for one shock.

    These are the matching targets: monthly draws are averaged into quarters
    before the moments are taken.
    """
    j = irfs.shock_labels.index(shock)
    draws = irfs.responses[:, j]  # (draws, vars, months)
    n_q = min(n_quarters, draws.shape[2] // 3)
    quarterly = draws[:, :, : 3 * n_q].reshape(draws.shape[0], draws.shape[1], n_q, 3).mean(axis=3)
    means = quarterly.mean(axis=0)
    variances = quarterly.var(axis=0, ddof=1)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scheme", "shock", "variable", "quarter", "mean", "variance"])
        for i, var in enumerate(irfs.variable_names):
            for q in range(n_q):
                writer.writerow([scheme, shock, var, q, _fmt(means[i, q]), _fmt(variances[i, q])])


def read_irf_moments(path) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Read targets from irf_moments.csv (mean/variance) or irf.csv bands.

    Given only quantile columns, the mean is approximated by the median and
    the variance by ((q84 - q16)/2)^2.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: empty table")
    has_moments = "mean" in rows[0] and "variance" in rows[0]
    horizon_key = "quarter" if "quarter" in rows[0] else "horizon"
    by_var: dict[str, dict[int, tuple[float, float]]] = {}
    for row in rows:
        var = row["variable"]
        h = int(row[horizon_key])
        if has_moments:
            mean, var_ = float(row["mean"]), float(row["variance"])
        else:
            mean = float(row["q50"])
            sd = (float(row["q84"]) - float(row["q16"])) / 2.0
            var_ = max(sd**2, 1e-12)
        by_var.setdefault(var, {})[h] = (mean, var_)
    variables = list(by_var)
    horizons = sorted(next(iter(by_var.values())))
    means = np.array([[by_var[v][h][0] for h in horizons] for v in variables])
    variances = np.array([[by_var[v][h][1] for h in horizons] for v in variables])
    return variables, means, variances


def write_fevd_csv(path, scheme: str, shares: np.ndarray, variables, shocks, horizon: int) -> None:
    """shares is (variables, shocks), averaged over accepted draws."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scheme", "variable", "shock", "horizon", "share"])
        for i, var in enumerate(variables):
            for j, shock in enumerate(shocks):
                writer.writerow([scheme, var, shock, horizon, _fmt(shares[i, j])])


def write_model_irf_csv(path, irfs: dict[str, np.ndarray], shock: str) -> None:
    """Model responses in the empirical long schema, horizon in quarters."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scheme", "shock", "variable", "horizon", "value"])
        for var, series in irfs.items():
            for h, value in enumerate(series):
                writer.writerow(["model", shock, var, h, _fmt(value)])


def write_fit_csv(path, variables, quarters, target_mean, target_var, model_vals) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variable", "quarter", "target", "target_sd", "model"])
        for i, var in enumerate(variables):
            for qi, q in enumerate(quarters):
                writer.writerow(
                    [var, q, _fmt(target_mean[i, qi]), _fmt(np.sqrt(target_var[i, qi])), _fmt(model_vals[i, qi])]
                )


# event-study tables --------------------------------------------------------

def write_tabulation(path_csv, path_txt, table) -> None:
    with open(path_csv, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["stock_sign", "rate_negative", "rate_zero", "rate_positive", "total"])
        for label, row, tot in (
            ("negative", table.cells[0], table.row_totals[0]),
            ("positive", table.cells[1], table.row_totals[1]),
        ):
            writer.writerow([label] + [int(v) for v in row] + [int(tot)])
        writer.writerow(["total"] + [int(v) for v in table.col_totals] + [table.total])
        writer.writerow(["excluded_zero_stock", table.footline, "", "", ""])
    Path(path_txt).write_text(table.as_text() + "\n", encoding="utf-8")


def write_stats_table(path, rows: dict[str, list[float]], header: list[str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample"] + header)
        for name, values in rows.items():
            writer.writerow([name] + [_fmt(v) for v in values])


def write_scatter(path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([c if isinstance(c, str) else _fmt(c) for c in row])
