"""Synthetic fixture factory.

Generates announcement-event datasets with prescribed co-movement cell
counts and monthly panels simulated from a known restricted VAR, together
with JSON manifests recording the generating truth. These are the test
fixtures and the input to the `simulate` subcommand; no real data ships with
the package.
"""

from __future__ import annotations

import csv
import datetime
import json
from pathlib import Path

import numpy as np

from .bvar import PosteriorDraw, simulate_var
from .ingest import SurpriseEvent, VariableInfo, MonthlyPanel, format_month

# cell layout mirrors the tabulation: rows stock (neg, pos) x cols rate (neg, zero, pos)
DEFAULT_CELLS = ((27, 26, 36), (39, 14, 12))
DEFAULT_COUNTRIES = ("brazil", "chile", "peru", "thailand", "mexico")


def make_events(
    seed: int = 20140301,
    cells=DEFAULT_CELLS,
    countries=DEFAULT_COUNTRIES,
    start_year: int = 1995,
) -> tuple[list[SurpriseEvent], dict]:
    """Events with exact cell counts and loosely realistic magnitudes.

    Exchange-rate changes load positively on the rate surprise in
    negative-comovement events and weakly otherwise, so the correlation
    tables have the right qualitative pattern.
    """
    rng = np.random.default_rng(seed)
    total = int(np.sum(cells))
    signs = []
    for r, row in enumerate(cells):
        stock_sign = -1.0 if r == 0 else 1.0
        for c, count in enumerate(row):
            rate_sign = (-1.0, 0.0, 1.0)[c]
            signs += [(rate_sign, stock_sign)] * int(count)
    rng.shuffle(signs)

    events = []
    day = datetime.date(start_year, 2, 1)
    for i, (rate_sign, stock_sign) in enumerate(signs):
        day = day + datetime.timedelta(days=int(rng.integers(28, 56)))
        d_rate = rate_sign * round(float(rng.gamma(2.0, 0.025)) + 0.005, 4)
        d_stock = stock_sign * round(float(rng.gamma(2.0, 0.3)) + 0.02, 4)
        ner = {}
        for k, country in enumerate(countries):
            comovement = d_rate * d_stock
            beta = 6.0 if comovement < 0 else (-1.0 if comovement > 0 else 0.5)
            shock = rng.standard_normal() * 0.9
            ner[country] = round(beta * d_rate + shock, 4)
        events.append(SurpriseEvent(day, d_rate, d_stock, ner))
    events.sort(key=lambda e: e.date)
    manifest = {
        "seed": seed,
        "cells": [list(map(int, row)) for row in cells],
        "total": total,
        "countries": list(countries),
        "generator": "synthetic-events",
    }
    return events, manifest


def write_events_csv(path, events: list[SurpriseEvent], countries=DEFAULT_COUNTRIES) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "d_rate", "d_stock"] + list(countries))
        for ev in events:
            row = [ev.date.isoformat(), repr(ev.d_rate), repr(ev.d_stock)]
            row += [repr(ev.ner_change[c]) if c in ev.ner_change else "" for c in countries]
            writer.writerow(row)


def true_var(n_macro: int = 2, n_surprise: int = 2, seed: int = 5) -> PosteriorDraw:
    """A stable restricted VAR(2) used as the simulation truth."""
    rng = np.random.default_rng(seed)
    n = n_surprise + n_macro
    coeffs = np.zeros((2, n, n))
    own = 0.45 + 0.1 * rng.random(n_macro)
    for i in range(n_macro):
        coeffs[0, n_surprise + i, n_surprise + i] = own[i]
        coeffs[1, n_surprise + i, n_surprise + i] = 0.15
    # macro responses to the surprises and to each other
    coeffs[0, n_surprise:, :n_surprise] = rng.uniform(-0.6, 0.6, (n_macro, n_surprise))
    for i in range(n_macro):
        for j in range(n_macro):
            if i != j:
                coeffs[0, n_surprise + i, n_surprise + j] = rng.uniform(-0.2, 0.2)
    const = np.zeros(n)
    const[n_surprise:] = rng.uniform(-0.1, 0.1, n_macro)
    a = rng.uniform(-0.4, 0.4, (n, n))
    sigma = 0.05 * (a @ a.T + n * np.eye(n))
    # negative rate/stock innovation correlation, as around announcements
    sigma[0, 1] = sigma[1, 0] = -0.6 * np.sqrt(sigma[0, 0] * sigma[1, 1])
    names = tuple(
        [f"surprise{i}" for i in range(n_surprise)] + [f"macro{i}" for i in range(n_macro)]
    )
    return PosteriorDraw(coeffs, const, sigma, n_surprise, names)


def make_panel(
    truth: PosteriorDraw,
    n_months: int = 360,
    seed: int = 11,
    start_month: int = 1995 * 12,
) -> tuple[MonthlyPanel, dict]:
    """Simulate a monthly panel from the restricted VAR truth."""
    rng = np.random.default_rng(seed)
    data = simulate_var(truth, n_months, rng)
    cols = [
        VariableInfo(name, "surprise" if i < truth.n_surprise else "em_macro", "level")
        for i, name in enumerate(truth.names)
    ]
    panel = MonthlyPanel(start_month, data, cols)
    manifest = {
        "seed": seed,
        "n_months": n_months,
        "start_month": format_month(start_month),
        "true_coeffs": truth.coeffs.tolist(),
        "true_const": truth.const.tolist(),
        "true_sigma": truth.sigma.tolist(),
        "n_surprise": truth.n_surprise,
        "names": list(truth.names),
        "generator": "synthetic-restricted-var",
    }
    return panel, manifest


def write_manifest_json(path, manifest: dict) -> None:
    Path(path).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
