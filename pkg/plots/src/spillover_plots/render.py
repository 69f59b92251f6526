"""Render publication-style figures from the pipeline's CSV outputs.

Four figure kinds are supported, one per documented schema:

* ``fan``     - irf_<scheme>.csv with q16/q50/q84 bands: one panel per
                (shock, variable) with the 68% band shaded and the median drawn
* ``scatter`` - scatter data from the event studies (rate vs stock surprise,
                or rate vs exchange-rate change per country)
* ``fit``     - fit.csv from the matching step: target band and model line
                per variable
* ``fevd``    - fevd_<scheme>.csv: stacked variance shares per variable

The renderer only reads the documented columns; a missing column is a
schema error reported on stderr with a nonzero exit code, and input files
are never modified.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("fan", "scatter", "fit", "fevd")

STYLE = {
    "figure.figsize": (7.0, 4.2),
    "figure.dpi": 110,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.25,
    "font.size": 11,
}

BAND_COLOR = "#9ecae1"
MEDIAN_COLOR = "#08519c"
MODEL_COLOR = "#a63603"
CLASS_COLORS = {
    "negative_comovement": "#c0392b",
    "positive_comovement": "#1f618d",
    "no_rate_response": "#7f8c8d",
    "ambiguous": "#b7950b",
}


class SchemaError(ValueError):
    pass


@dataclass
class PlotJob:
    kind: str
    input_path: Path
    out_dir: Path
    image_format: str = "png"
    dpi: int = 150
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        self.input_path = Path(self.input_path)
        self.out_dir = Path(self.out_dir)
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")


def read_table(path: Path, required: tuple[str, ...]) -> list[dict]:
    if not path.exists():
        raise SchemaError(f"input file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing required column(s) {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _slug(text: str) -> str:
    return "".join(c if c.isalnum() else "_" for c in text).strip("_").lower()


def _save(fig, job: PlotJob, name: str) -> Path:
    job.out_dir.mkdir(parents=True, exist_ok=True)
    path = job.out_dir / f"{name}.{job.image_format}"
    fig.savefig(path, dpi=job.dpi, bbox_inches="tight", metadata={"Software": "spillover-plot"})
    plt.close(fig)
    return path


def render_fan(job: PlotJob) -> list[Path]:
    rows = read_table(job.input_path, ("scheme", "shock", "variable", "horizon", "q16", "q50", "q84"))
    groups: dict[tuple[str, str, str], list[dict]] = {}
    for row in rows:
        groups.setdefault((row["scheme"], row["shock"], row["variable"]), []).append(row)
    written = []
    for (scheme, shock, variable), cells in groups.items():
        cells.sort(key=lambda r: int(r["horizon"]))
        h = np.array([int(r["horizon"]) for r in cells])
        q16 = np.array([float(r["q16"]) for r in cells])
        q50 = np.array([float(r["q50"]) for r in cells])
        q84 = np.array([float(r["q84"]) for r in cells])
        fig, ax = plt.subplots()
        ax.fill_between(h, q16, q84, color=BAND_COLOR, alpha=0.7, label="68% band")
        ax.plot(h, q50, color=MEDIAN_COLOR, lw=1.8, label="median")
        ax.axhline(0.0, color="black", lw=0.8)
        ax.set_xlabel("horizon")
        ax.set_title(f"{variable} response to {shock} ({scheme})")
        ax.legend(frameon=False, fontsize=9)
        written.append(_save(fig, job, f"fan_{_slug(scheme)}_{_slug(shock)}_{_slug(variable)}"))
    return written


def render_scatter(job: PlotJob) -> list[Path]:
    with open(job.input_path, newline="", encoding="utf-8") as fh:
        header = (csv.reader(fh).__next__() if job.input_path.exists() else [])
    if "d_stock" in header:
        rows = read_table(job.input_path, ("d_rate", "d_stock", "event_class"))
        y_col, y_label, by_country = "d_stock", "stock surprise (%)", False
    else:
        rows = read_table(job.input_path, ("d_rate", "ner_change", "event_class", "country"))
        y_col, y_label, by_country = "ner_change", "exchange rate change (%)", True

    def one(points, name, title):
        fig, ax = plt.subplots()
        for cls, color in CLASS_COLORS.items():
            xs = [float(r["d_rate"]) for r in points if r["event_class"] == cls]
            ys = [float(r[y_col]) for r in points if r["event_class"] == cls]
            if xs:
                ax.scatter(xs, ys, s=18, alpha=0.75, color=color, label=cls.replace("_", " "))
        ax.axhline(0.0, color="black", lw=0.8)
        ax.axvline(0.0, color="black", lw=0.8)
        ax.set_xlabel("interest rate surprise (pp)")
        ax.set_ylabel(y_label)
        ax.set_title(title)
        ax.legend(frameon=False, fontsize=8)
        return _save(fig, job, name)

    if not by_country:
        return [one(rows, "scatter_rate_stock", "announcement surprises")]
    written = []
    countries = sorted({r["country"] for r in rows})
    for country in countries:
        pts = [r for r in rows if r["country"] == country]
        written.append(one(pts, f"scatter_rate_ner_{_slug(country)}", f"rate surprise vs NER: {country}"))
    return written


def render_fit(job: PlotJob) -> list[Path]:
    rows = read_table(job.input_path, ("variable", "quarter", "target", "target_sd", "model"))
    groups: dict[str, list[dict]] = {}
    for row in rows:
        groups.setdefault(row["variable"], []).append(row)
    written = []
    for variable, cells in groups.items():
        cells.sort(key=lambda r: int(r["quarter"]))
        q = np.array([int(r["quarter"]) for r in cells])
        target = np.array([float(r["target"]) for r in cells])
        sd = np.array([float(r["target_sd"]) for r in cells])
        model = np.array([float(r["model"]) for r in cells])
        fig, ax = plt.subplots()
        ax.fill_between(q, target - sd, target + sd, color=BAND_COLOR, alpha=0.7, label="target ± sd")
        ax.plot(q, target, color=MEDIAN_COLOR, lw=1.6, label="target")
        ax.plot(q, model, color=MODEL_COLOR, lw=1.8, ls="--", label="model")
        ax.axhline(0.0, color="black", lw=0.8)
        ax.set_xlabel("quarter")
        ax.set_title(f"matched response: {variable}")
        ax.legend(frameon=False, fontsize=9)
        written.append(_save(fig, job, f"fit_{_slug(variable)}"))
    return written


def render_fevd(job: PlotJob) -> list[Path]:
    rows = read_table(job.input_path, ("scheme", "variable", "shock", "horizon", "share"))
    scheme = rows[0]["scheme"]
    horizon = rows[0]["horizon"]
    variables = sorted({r["variable"] for r in rows})
    shocks = sorted({r["shock"] for r in rows})
    shares = np.zeros((len(variables), len(shocks)))
    for r in rows:
        shares[variables.index(r["variable"]), shocks.index(r["shock"])] = float(r["share"])
    fig, ax = plt.subplots(figsize=(7.5, 4.2))
    bottom = np.zeros(len(variables))
    palette = plt.get_cmap("tab10")
    for j, shock in enumerate(shocks):
        ax.bar(variables, shares[:, j], bottom=bottom, label=shock, color=palette(j % 10))
        bottom += shares[:, j]
    ax.set_ylim(0, 1.02)
    ax.set_ylabel("share of forecast error variance")
    ax.set_title(f"variance decomposition at horizon {horizon} ({scheme})")
    ax.legend(frameon=False, fontsize=9)
    plt.setp(ax.get_xticklabels(), rotation=30, ha="right")
    return [_save(fig, job, f"fevd_{_slug(scheme)}")]


RENDERERS = {
    "fan": render_fan,
    "scatter": render_scatter,
    "fit": render_fit,
    "fevd": render_fevd,
}


def render(job: PlotJob) -> list[Path]:
    plt.rcParams.update(STYLE)
    return RENDERERS[job.kind](job)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spillover-plot",
        description="render figures from spillover CSV outputs",
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("input", help="CSV file in the documented schema for the kind")
    parser.add_argument("outdir", help="directory for the image files")
    parser.add_argument("--format", default="png", choices=("png", "pdf", "svg"))
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    try:
        job = PlotJob(args.kind, Path(args.input), Path(args.outdir), args.format, args.dpi)
        written = render(job)
    except SchemaError as exc:
        print(f"spillover-plot: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
