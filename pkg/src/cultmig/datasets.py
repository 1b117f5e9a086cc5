"""Synthetic corpora with the same shape as the real inputs.

Country codes come from the ISO 3166 user-assigned block (QMA-QZZ), so a
synthetic corpus can never be mistaken for real countries.
"""

import csv
import itertools
import string
from pathlib import Path

import numpy as np

from .culture import DIMENSIONS, CultureProfile
from .geodesy import CapitalRegistry, GeoPoint
from .ingest import (
    FILENAMES,
    HOFSTEDE_COLUMNS,
    POPULATION_YEARS,
    STOCK_COLUMNS,
    WAVES,
    Corpus,
    PopulationSeries,
    StockRecord,
    write_population_csv,
)


def synthetic_codes(n):
    codes = ["Q" + a + b for a, b in itertools.product(string.ascii_uppercase[12:], string.ascii_uppercase)]
    if n > len(codes):
        raise ValueError(f"at most {len(codes)} synthetic countries")
    return codes[:n]


def make_synthetic_corpus(n_oecd=36, n_non_oecd=57, seed=0, missing_rate=0.05):
    """Random corpus in which migration decays with cultural distance.

    Roughly ``missing_rate`` of the stock pairs have only one census wave and
    so no defined flow. The result is fully determined by ``seed``.
    """
    rng = np.random.default_rng(seed)
    codes = synthetic_codes(n_oecd + n_non_oecd)
    oecd = frozenset(codes[:n_oecd])

    scores = rng.integers(0, 101, size=(len(codes), len(DIMENSIONS)))
    profiles = {
        c: CultureProfile(c, *map(float, row)) for c, row in zip(codes, scores)
    }
    lat = np.degrees(np.arcsin(rng.uniform(-0.95, 0.95, len(codes))))
    lon = rng.uniform(-180, 180, len(codes))
    capitals = CapitalRegistry(
        {c: GeoPoint(round(float(a), 5), round(float(b), 5)) for c, a, b in zip(codes, lat, lon)},
        {c: f"Capital {c}" for c in codes},
    )

    populations = {}
    base = rng.uniform(1e6, 1e8, len(codes))
    growth = rng.uniform(-0.005, 0.02, len(codes))
    for c, b, g in zip(codes, base, growth):
        populations[c] = PopulationSeries.from_mapping(
            c, {y: float(round(b * (1 + g) ** (y - 1995))) for y in POPULATION_YEARS}
        )

    stocks = []
    for o in codes:
        for d in sorted(oecd):
            if o == d:
                continue
            cd = float(np.linalg.norm(profiles[o].as_array() - profiles[d].as_array()))
            level = rng.lognormal(mean=8.0 - cd / 40.0, sigma=1.0)
            trend = rng.normal(0.15, 0.25)
            waves = list(WAVES)
            if rng.uniform() < missing_rate:
                waves = [waves[int(rng.integers(len(waves)))]]
            for k, y in enumerate(WAVES):
                if y not in waves:
                    continue
                stock = max(0.0, level * (1 + trend) ** k + rng.normal(0, level * 0.05))
                stocks.append(StockRecord(o, d, y, float(round(stock))))
    stocks.sort(key=lambda r: (r.origin, r.destination, r.year))
    return Corpus(profiles, capitals, tuple(stocks), populations, oecd)


def write_corpus(corpus, data_dir):
    """Write a corpus as the five input files; returns the directory."""
    root = Path(data_dir)
    root.mkdir(parents=True, exist_ok=True)
    with open(root / FILENAMES["hofstede"], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HOFSTEDE_COLUMNS)
        for c in sorted(corpus.profiles):
            p = corpus.profiles[c]
            w.writerow([c] + [repr(getattr(p, d)) for d in DIMENSIONS])
    corpus.capitals.to_csv(root / FILENAMES["capitals"])
    with open(root / FILENAMES["stock"], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(STOCK_COLUMNS)
        for r in corpus.stocks:
            w.writerow([r.origin, r.destination, r.year, repr(r.stock)])
    write_population_csv(corpus.populations, root / FILENAMES["population"])
    (root / FILENAMES["oecd"]).write_text(
        "".join(f"{c}\n" for c in sorted(corpus.oecd_members)), encoding="utf-8"
    )
    return root
