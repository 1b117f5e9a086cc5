"""Cultural proximity stratification and the per-country test batteries.

Country pairs are split into culturally close, mid-distant and distant
groups at the lower and upper quartiles of all pairwise cultural
distances. For each focal country the close and distant groups are then
compared with one-sided Mann-Whitney tests on geodesic distance,
normalised inflows (OECD hosts) or normalised outflows (origins).
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .culture import MAX_DISTANCE, pairwise_cultural_distances
from .exceptions import ConfigurationError, DegenerateSampleError, InputError, UnknownCountryError
from .flows import build_flow_matrix
from .geodesy import distance_matrix_km
from .stats import TestResult, mann_whitney_u, quantile, robust_summary, wilcoxon_signed_rank
from .validation import check_column

PAPER_THRESHOLDS = (61.6, 93.4)
SPARSE_MAX = 3
ALPHA = 0.1
TABLE_ROWS = 12

BATTERIES = ("geotrend", "immigration", "emigration")


class ProximityClass(str, enum.Enum):
    CLOSE = "close"
    MID = "mid_distant"
    DISTANT = "distant"

    def __str__(self):
        return self.value


GROUPS = (ProximityClass.CLOSE, ProximityClass.MID, ProximityClass.DISTANT)


@dataclass(frozen=True)
class ProximityThresholds:
    """``close_max`` is inclusive, ``distant_min`` exclusive."""

    close_max: float
    distant_min: float

    def __post_init__(self):
        if not 0 < self.close_max < self.distant_min < MAX_DISTANCE:
            raise ConfigurationError(
                f"degenerate proximity thresholds {self.close_max!r} / {self.distant_min!r}"
            )


def stratification_thresholds(cd_values, n_countries=None, close_q=0.25, distant_q=0.75):
    """Lower and upper quartile of the pairwise cultural distances.

    With ``n_countries`` the sample must hold every unordered pair.
    """
    x = check_column(cd_values, "cd_values")
    if n_countries is not None and x.size != n_countries * (n_countries - 1) // 2:
        raise InputError(
            f"expected {n_countries * (n_countries - 1) // 2} pairwise distances "
            f"for {n_countries} countries, got {x.size}"
        )
    return ProximityThresholds(quantile(x, close_q), quantile(x, distant_q))


def classify_proximity(cd, thresholds):
    if cd <= thresholds.close_max:
        return ProximityClass.CLOSE
    if cd > thresholds.distant_min:
        return ProximityClass.DISTANT
    return ProximityClass.MID


class ProximityStratifier(TransformerMixin, BaseEstimator):
    """Learn close/distant cut-offs from pairwise distances and label pairs.

    Parameters
    ----------
    close_quantile, distant_quantile : float
        Quantiles of the training distances used as cut-offs.
    thresholds : tuple of two floats, optional
        Fixed ``(close_max, distant_min)``; when given, ``fit`` learns nothing.
    """

    def __init__(self, close_quantile=0.25, distant_quantile=0.75, thresholds=None):
        self.close_quantile = close_quantile
        self.distant_quantile = distant_quantile
        self.thresholds = thresholds

    def fit(self, X, y=None):
        if self.thresholds is not None:
            self.thresholds_ = ProximityThresholds(*map(float, self.thresholds))
        else:
            self.thresholds_ = stratification_thresholds(
                X, close_q=self.close_quantile, distant_q=self.distant_quantile
            )
        return self

    def transform(self, X):
        check_is_fitted(self, "thresholds_")
        x = check_column(X)
        return np.array([classify_proximity(v, self.thresholds_).value for v in x], dtype=object)

    predict = transform


@dataclass(frozen=True)
class CountryPairMetrics:
    country_a: str
    country_b: str
    cd: float
    gd_km: float
    proximity: ProximityClass


@dataclass(frozen=True)
class Grouping:
    """Counterpart values split by proximity, plus the samples actually tested."""

    close: tuple
    mid: tuple
    distant: tuple
    test_close: tuple
    test_distant: tuple
    sparse_rule_applied: bool = False
    merged_into: str | None = None

    @property
    def total(self):
        return len(self.close) + len(self.mid) + len(self.distant)


@dataclass(frozen=True)
class DirectionalResult:
    focal: str
    battery: str
    medians: dict
    counts: dict
    test: object  # TestResult for the reported side, or None when untested
    p_greater: float | None
    p_less: float | None
    direction: str
    sparse_rule_applied: bool
    note: str = ""

    @property
    def significance_code(self):
        return self.test.significance_code if self.test is not None and self.direction != "none" else ""


_LABELS = {
    # battery: (label when close > distant, label when close < distant)
    "geotrend": ("decreasing", "increasing"),
    "immigration": ("toward_close", "toward_distant"),
    "emigration": ("toward_close", "toward_distant"),
}


def group_values(values, classes, sparse_rule=True):
    """Partition ``{counterpart: value}`` by ``{counterpart: ProximityClass}``.

    When the close or distant group holds at most ``SPARSE_MAX`` values and
    ``sparse_rule`` is on, the mid-distant values are merged into the smaller
    of the two extremes before testing (ties go to the close group).
    """
    buckets = {g: [] for g in GROUPS}
    for counterpart in sorted(values):
        buckets[classes[counterpart]].append(values[counterpart])
    close, mid, distant = (tuple(buckets[g]) for g in GROUPS)
    test_close, test_distant = close, distant
    applied, merged = False, None
    if sparse_rule and min(len(close), len(distant)) <= SPARSE_MAX:
        applied = True
        if len(close) <= len(distant):
            test_close, merged = close + mid, ProximityClass.CLOSE.value
        else:
            test_distant, merged = distant + mid, ProximityClass.DISTANT.value
    return Grouping(close, mid, distant, test_close, test_distant, applied, merged)


def _median_or_none(sample):
    return quantile(sample, 0.5) if sample else None


def directional_test(focal, battery, grouping, alpha=ALPHA, skip_all_zero=False):
    """Run both one-sided tests of close vs distant and pick the stronger side."""
    medians = {
        "close": _median_or_none(grouping.close),
        "mid_distant": _median_or_none(grouping.mid),
        "distant": _median_or_none(grouping.distant),
    }
    counts = {
        "close": len(grouping.close),
        "mid_distant": len(grouping.mid),
        "distant": len(grouping.distant),
    }

    def untested(note):
        return DirectionalResult(
            focal, battery, medians, counts, None, None, None, "none",
            grouping.sparse_rule_applied, note,
        )

    if not grouping.test_close or not grouping.test_distant:
        return untested("empty comparison group")
    if skip_all_zero and not any(grouping.close + grouping.mid + grouping.distant):
        return untested("all values zero")
    greater = mann_whitney_u(grouping.test_close, grouping.test_distant, "greater")
    less = mann_whitney_u(grouping.test_close, grouping.test_distant, "less")
    best = greater if greater.p_value <= less.p_value else less
    direction = "none"
    if best.p_value < alpha:
        labels = _LABELS[battery]
        direction = labels[0] if best is greater else labels[1]
    return DirectionalResult(
        focal, battery, medians, counts, best, greater.p_value, less.p_value, direction,
        grouping.sparse_rule_applied,
    )


class CultureMigrationAnalysis(BaseEstimator):
    """Full pipeline over a validated corpus.

    Parameters
    ----------
    thresholds : {"recompute", "paper"} or tuple
        Recompute quartile cut-offs from the corpus, pin them to 61.6 / 93.4,
        or give explicit ``(close_max, distant_min)`` values.
    flow_estimator : {"positive_diff", "signed_diff"}
    sparse_rule : bool
        Merge the mid-distant group into a sparse extreme group.
    alpha : float
        A direction is reported only when the smaller one-sided p is below it.
    """

    def __init__(self, thresholds="recompute", flow_estimator="positive_diff",
                 sparse_rule=True, alpha=ALPHA):
        self.thresholds = thresholds
        self.flow_estimator = flow_estimator
        self.sparse_rule = sparse_rule
        self.alpha = alpha

    def fit(self, corpus, y=None):
        self.corpus_ = corpus
        self.codes_, self.cd_matrix_ = pairwise_cultural_distances(corpus.profiles)
        self.index_ = {c: i for i, c in enumerate(self.codes_)}
        self.gd_matrix_ = distance_matrix_km(self.codes_, corpus.capitals)
        iu = np.triu_indices(len(self.codes_), k=1)
        self.pair_cd_ = self.cd_matrix_[iu]
        self.pair_gd_ = self.gd_matrix_[iu]
        self.pair_index_ = list(zip(iu[0].tolist(), iu[1].tolist()))

        if isinstance(self.thresholds, str):
            if self.thresholds == "paper":
                pinned = PAPER_THRESHOLDS
            elif self.thresholds == "recompute":
                pinned = None
            else:
                raise ConfigurationError(f"unknown threshold mode {self.thresholds!r}")
        else:
            pinned = tuple(self.thresholds)
        self.stratifier_ = ProximityStratifier(thresholds=pinned).fit(self.pair_cd_)
        self.thresholds_ = self.stratifier_.thresholds_

        self.oecd_ = sorted(corpus.oecd_members)
        self.set_flows(build_flow_matrix(corpus, estimator=self.flow_estimator))
        return self

    def set_flows(self, records):
        """Replace the flow matrix, e.g. with transformed per-million values."""
        self.flows_ = list(records)
        self._flow_index = {(r.origin, r.destination): r for r in self.flows_}
        return self

    # pair-level lookups

    def _check(self, code):
        if code not in self.index_:
            raise UnknownCountryError(f"country {code!r} not in corpus")
        return self.index_[code]

    def cd(self, a, b):
        return float(self.cd_matrix_[self._check(a), self._check(b)])

    def gd_km(self, a, b):
        return float(self.gd_matrix_[self._check(a), self._check(b)])

    def proximity(self, a, b):
        return classify_proximity(self.cd(a, b), self.thresholds_)

    def pair(self, a, b):
        check_is_fitted(self, "thresholds_")
        return CountryPairMetrics(a, b, self.cd(a, b), self.gd_km(a, b), self.proximity(a, b))

    def _require_oecd(self, code, what):
        self._check(code)
        if code not in self.corpus_.oecd_members:
            raise InputError(f"{code} is not an OECD member; {what} needs an OECD host")

    # grouping

    def group_by_proximity(self, focal, role, field="flow"):
        """Split the focal country's counterparts into proximity groups.

        ``role="host"`` uses all other countries as counterparts (inflows, or
        geodesic distance when ``field="gd"``); ``role="origin"`` uses the
        OECD destinations of ``focal``.
        """
        check_is_fitted(self, "thresholds_")
        self._check(focal)
        if role == "host":
            others = [c for c in self.codes_ if c != focal]
            if field == "gd":
                values = {c: self.gd_km(focal, c) for c in others}
            else:
                self._require_oecd(focal, "inflow grouping")
                values = {c: self._flow_index[(c, focal)].per_million_host for c in others}
        elif role == "origin":
            values = {
                d: self._flow_index[(focal, d)].per_million_origin
                for d in self.oecd_
                if d != focal
            }
        else:
            raise InputError(f"role must be 'host' or 'origin', got {role!r}")
        classes = {c: self.proximity(focal, c) for c in values}
        return group_values(values, classes, sparse_rule=self.sparse_rule)

    # batteries

    def geodesic_trend_test(self, host):
        self._require_oecd(host, "the geodesic trend test")
        grouping = self.group_by_proximity(host, "host", field="gd")
        return directional_test(host, "geotrend", grouping, self.alpha)

    def immigration_bias_test(self, host):
        self._require_oecd(host, "the immigration bias test")
        grouping = self.group_by_proximity(host, "host")
        return directional_test(host, "immigration", grouping, self.alpha, skip_all_zero=True)

    def emigration_bias_test(self, origin):
        grouping = self.group_by_proximity(origin, "origin")
        return directional_test(origin, "emigration", grouping, self.alpha, skip_all_zero=True)

    def migration_significance_test(self, country, direction):
        """One-sided signed-rank test of normalised flows against zero.

        An all-zero sample has nothing to rank and is reported as p = 1.
        """
        check_is_fitted(self, "thresholds_")
        if direction == "inflow":
            self._require_oecd(country, "the inflow significance test")
            sample = [r.per_million_host for r in self.flows_ if r.destination == country]
        elif direction == "outflow":
            self._check(country)
            sample = [r.per_million_origin for r in self.flows_ if r.origin == country]
        else:
            raise InputError(f"direction must be 'inflow' or 'outflow', got {direction!r}")
        try:
            return wilcoxon_signed_rank(sample, 0.0, "greater")
        except DegenerateSampleError:
            return TestResult(0.0, 1.0, "greater", 0, None, "degenerate", "")

    def run_batteries(self):
        """All battery results keyed by battery name, then focal country."""
        check_is_fitted(self, "thresholds_")
        return {
            "geotrend": {h: self.geodesic_trend_test(h) for h in self.oecd_},
            "immigration": {h: self.immigration_bias_test(h) for h in self.oecd_},
            "emigration": {o: self.emigration_bias_test(o) for o in self.codes_},
            "inflow_significance": {
                h: self.migration_significance_test(h, "inflow") for h in self.oecd_
            },
            "outflow_significance": {
                o: self.migration_significance_test(o, "outflow") for o in self.codes_
            },
        }

    # corpus-level medians

    def grand_medians(self):
        """Pooled and per-group medians behind the reference lines in the figures."""
        check_is_fitted(self, "thresholds_")
        oecd = self.corpus_.oecd_members

        def pooled(pairs):
            groups = {g.value: [] for g in GROUPS}
            allv = []
            for a, b, v in pairs:
                groups[self.proximity(a, b).value].append(v)
                allv.append(v)
            return {
                "grand": _median_or_none(allv),
                **{k: _median_or_none(v) for k, v in groups.items()},
                "n": len(allv),
            }

        flows = self.flows_
        return {
            "geodesic_km": pooled(
                (h, c, self.gd_km(h, c)) for h in self.oecd_ for c in self.codes_ if c != h
            ),
            "inflow": pooled((r.origin, r.destination, r.per_million_host) for r in flows),
            "outflow_oecd": pooled(
                (r.origin, r.destination, r.per_million_origin) for r in flows if r.origin in oecd
            ),
            "outflow_non_oecd": pooled(
                (r.origin, r.destination, r.per_million_origin)
                for r in flows
                if r.origin not in oecd
            ),
        }

    # report datasets

    def unordered_pairs(self):
        for (i, j), cd, gd in zip(self.pair_index_, self.pair_cd_, self.pair_gd_):
            yield self.codes_[i], self.codes_[j], float(cd), float(gd)

    def build_tables(self, n_rows=TABLE_ROWS):
        check_is_fitted(self, "thresholds_")
        pairs = list(self.unordered_pairs())
        table1 = {
            "cultural_distance": robust_summary(self.pair_cd_),
            "geodesic_distance_km": robust_summary(self.pair_gd_),
            "n_pairs": len(pairs),
        }
        closest = sorted(pairs, key=lambda p: (p[2], p[0], p[1]))[:n_rows]
        farthest = sorted(pairs, key=lambda p: (-p[2], p[0], p[1]))[:n_rows]
        return table1, closest, farthest

    def proximity_matrix(self, rows, cols):
        out = []
        for r in rows:
            counterparts = [c for c in cols if c != r]
            out.append({
                "focal": r,
                "counterparts": counterparts,
                "cd": [self.cd(r, c) for c in counterparts],
                "proximity": [self.proximity(r, c).value for c in counterparts],
            })
        return out


def median_difference(result):
    close, distant = result.medians["close"], result.medians["distant"]
    if close is None or distant is None:
        return -math.inf
    return close - distant


@dataclass
class AnalysisReport:
    """Everything the reproduction writes out, before rendering."""

    thresholds: ProximityThresholds
    table1: dict
    table2: list
    table3: list
    batteries: dict
    grand_medians: dict
    figures: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)


def build_figure_data(analysis, batteries):
    """Plot-ready datasets for the five figures."""
    oecd = analysis.oecd_
    non = [c for c in analysis.codes_ if c not in analysis.corpus_.oecd_members]
    gm = analysis.grand_medians()

    def ordered(results, key):
        return sorted(results, key=lambda r: (key(r), r.focal))

    geo = list(batteries["geotrend"].values())
    fig3 = ordered(
        geo,
        lambda r: r.medians["close"] if r.medians["close"] is not None else math.inf,
    )
    imm = list(batteries["immigration"].values())
    fig4 = ordered(imm, lambda r: -median_difference(r))
    emi = batteries["emigration"]
    fig5a = ordered([emi[o] for o in oecd], lambda r: -median_difference(r))
    fig5b = ordered([emi[o] for o in non], lambda r: -median_difference(r))
    return {
        "fig1": analysis.proximity_matrix(oecd, non),
        "fig2": analysis.proximity_matrix(oecd, oecd),
        "fig3": {"reference": gm["geodesic_km"], "rows": fig3},
        "fig4": {"reference": gm["inflow"], "rows": fig4},
        "fig5a": {"reference": gm["outflow_oecd"], "rows": fig5a},
        "fig5b": {"reference": gm["outflow_non_oecd"], "rows": fig5b},
    }


def run_analysis(corpus, **params):
    """Fit the pipeline and assemble an ``AnalysisReport``."""
    analysis = CultureMigrationAnalysis(**params).fit(corpus)
    batteries = analysis.run_batteries()
    table1, table2, table3 = analysis.build_tables()
    report = AnalysisReport(
        thresholds=analysis.thresholds_,
        table1=table1,
        table2=table2,
        table3=table3,
        batteries=batteries,
        grand_medians=analysis.grand_medians(),
        figures=build_figure_data(analysis, batteries),
        config=analysis.get_params(),
    )
    return analysis, report
