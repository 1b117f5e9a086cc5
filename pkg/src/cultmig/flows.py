"""Average annual migration flows estimated from five-yearly migrant stocks."""

import csv
import logging
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import ConfigurationError, InputError
from .ingest import WAVES

logger = logging.getLogger(__name__)

ESTIMATORS = ("positive_diff", "signed_diff")
PER_MILLION = 1e6

FLOW_COLUMNS = (
    "origin_code",
    "dest_code",
    "avg_annual_flow",
    "per_million_host",
    "per_million_origin",
    "defined_flag",
)


@dataclass(frozen=True)
class FlowRecord:
    origin: str
    destination: str
    avg_annual_flow: float
    per_million_host: float
    per_million_origin: float
    defined: bool = True


def _check_estimator(name):
    name = name.replace("-", "_")
    if name not in ESTIMATORS:
        raise ConfigurationError(f"flow estimator must be one of {ESTIMATORS}, got {name!r}")
    return name


def _flow_from_series(years, stocks, estimator):
    if len(years) < 2:
        return None
    span = years[-1] - years[0]
    if estimator == "positive_diff":
        gained = math.fsum(max(b - a, 0.0) for a, b in zip(stocks, stocks[1:]))
    else:
        # net change, floored so that a shrinking stock reads as no inflow
        gained = max(stocks[-1] - stocks[0], 0.0)
    return gained / span


def estimate_annual_flow(stocks, estimator="positive_diff"):
    """Average annual flow (persons/year) for one origin-destination pair.

    ``stocks`` maps census year to migrant stock; missing waves are simply
    absent. With ``positive_diff`` the flow is the sum of stock increases
    between consecutive available waves divided by the years spanned.
    Returns ``None`` when fewer than two waves are available.

    >>> estimate_annual_flow({1995: 100, 2000: 150, 2005: 150, 2010: 130, 2015: 190})
    5.5
    """
    estimator = _check_estimator(estimator)
    items = sorted((int(y), float(s)) for y, s in stocks.items() if s is not None and not math.isnan(s))
    for year, stock in items:
        if stock < 0:
            raise InputError(f"negative stock {stock} in {year}")
    return _flow_from_series([y for y, _ in items], [s for _, s in items], estimator)


def normalize_flow(flow, population):
    """Flow per one million inhabitants, using the mean population.

    ``population`` is a ``PopulationSeries`` or a plain number (the mean).
    """
    mean = population if isinstance(population, (int, float)) else population.mean
    if not mean > 0:
        raise InputError("mean population must be positive")
    return flow / mean * PER_MILLION


class StockFlowTransformer(TransformerMixin, BaseEstimator):
    """Convert rows of wave stocks into average annual flows.

    ``X`` has one row per country pair and one column per wave (in the
    order of ``waves``); NaN marks a missing wave. ``transform`` returns a
    1-d array of flows with NaN where fewer than two waves are present.
    """

    def __init__(self, estimator="positive_diff", waves=WAVES):
        self.estimator = estimator
        self.waves = waves

    def fit(self, X=None, y=None):
        self.estimator_ = _check_estimator(self.estimator)
        self.waves_ = tuple(int(w) for w in self.waves)
        if list(self.waves_) != sorted(set(self.waves_)):
            raise ConfigurationError("waves must be strictly increasing")
        self.n_features_in_ = len(self.waves_)
        return self

    def transform(self, X):
        check_is_fitted(self, "estimator_")
        X = check_array(X, ensure_all_finite="allow-nan", ensure_min_samples=0)
        if X.shape[1] != self.n_features_in_:
            raise InputError(f"expected {self.n_features_in_} wave columns, got {X.shape[1]}")
        if np.any(X < 0):
            raise InputError("stocks must be non-negative")
        out = np.full(X.shape[0], np.nan)
        for i, row in enumerate(X):
            ok = ~np.isnan(row)
            years = [w for w, keep in zip(self.waves_, ok) if keep]
            flow = _flow_from_series(years, list(row[ok]), self.estimator_)
            if flow is not None:
                out[i] = flow
        return out


def stock_table(stocks):
    """Group stock records into ``{(origin, dest): {year: stock}}``."""
    table = defaultdict(dict)
    for rec in stocks:
        table[(rec.origin, rec.destination)][rec.year] = rec.stock
    return table


def build_flow_matrix(corpus, estimator="positive_diff"):
    """One ``FlowRecord`` per (origin, OECD destination) pair, origin != destination.

    Pairs with fewer than two stock waves are kept as zero flows with
    ``defined=False``. Output is sorted by origin, then destination.
    """
    table = stock_table(corpus.stocks)
    pairs = [
        (o, d)
        for o in sorted(corpus.profiles)
        for d in sorted(corpus.oecd_members)
        if o != d
    ]
    X = np.array(
        [[table.get(p, {}).get(w, np.nan) for w in WAVES] for p in pairs], dtype=float
    ).reshape(len(pairs), len(WAVES))
    flows = StockFlowTransformer(estimator=estimator).fit().transform(X)

    mean_pop = {c: s.mean for c, s in corpus.populations.items()}
    records = []
    undefined = 0
    for (o, d), flow in zip(pairs, flows):
        defined = not np.isnan(flow)
        if not defined:
            undefined += 1
            flow = 0.0
        flow = float(flow)
        records.append(
            FlowRecord(
                origin=o,
                destination=d,
                avg_annual_flow=flow,
                per_million_host=normalize_flow(flow, mean_pop[d]),
                per_million_origin=normalize_flow(flow, mean_pop[o]),
                defined=defined,
            )
        )
    if undefined:
        logger.info("%d pairs have fewer than two stock waves; recorded as zero flow", undefined)
    return records


def write_flows_csv(records, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FLOW_COLUMNS)
        for r in records:
            writer.writerow([
                r.origin,
                r.destination,
                f"{r.avg_annual_flow:.2f}",
                f"{r.per_million_host:.2f}",
                f"{r.per_million_origin:.2f}",
                int(r.defined),
            ])
