"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Criteria 2, 6, 7 and the real-corpus half of 5 need the assembled public
inputs (hofstede.csv, un_stock.csv, population.csv) in ``$CULTMIG_DATA_DIR``
or ``./data``. Without them those criteria fail with a diagnostic; they are
never skipped.

Run directly (``python tests/test_acceptance.py``) for just the verdict lines.
"""

import copy
import dataclasses
import itertools
import time

import numpy as np
import pytest

from cultmig.analysis import CultureMigrationAnalysis
from cultmig.cli import main as cli_main
from cultmig.culture import (
    DEFAULT_OVERRIDES,
    MAX_DISTANCE,
    CultureProfile,
    apply_overrides,
    cultural_distance,
    pairwise_cultural_distances,
)
from cultmig.datasets import make_synthetic_corpus, write_corpus
from cultmig.flows import build_flow_matrix, normalize_flow
from cultmig.geodesy import capital_distance_km, distance_matrix_km, inverse_geodesic
from cultmig.ingest import FILENAMES, load_capitals, load_corpus, load_hofstede, validate_corpus
from cultmig.report import METADATA_FILE
from cultmig.stats import mann_whitney_u, robust_summary, wilcoxon_signed_rank
from oracles import enumerate_rank_sum_p, enumerate_signed_rank_p, geodesic_quadrature
from reference import ACCEPTANCE_LINES, EXCERPT, real_data_dir, real_file


def verdict(number, title, ok, detail):
    line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def missing_data(number, title, kinds):
    root = real_data_dir(require=())
    names = ", ".join(FILENAMES[k] for k in kinds)
    verdict(number, title, False,
            f"real input files ({names}) not found in {root.resolve()}; set CULTMIG_DATA_DIR")


@pytest.fixture(scope="module")
def real_corpus():
    root = real_data_dir()
    return None if root is None else load_corpus(root)


@pytest.fixture(scope="module")
def real_analysis(real_corpus):
    if real_corpus is None:
        return None
    return CultureMigrationAnalysis().fit(real_corpus)


# 1 -------------------------------------------------------------------------

def test_criterion_1_cultural_distances():
    title = "cultural distances of published pairs within 0.05, under 1 s"
    path = real_file("hofstede") or EXCERPT
    start = time.perf_counter()
    profiles = load_hofstede(path)
    expected = {("AUS", "USA"): 8.06, ("EST", "LTU"): 12.24, ("VEN", "LVA"): 139.20, ("UKR", "DNK"): 137.55}
    absent = sorted({c for pair in expected for c in pair} - set(profiles))
    if absent:
        verdict(1, title, False, f"source={path} lacks profiles for {', '.join(absent)}")
    got = {k: cultural_distance(profiles[k[0]], profiles[k[1]]) for k in expected}
    elapsed = time.perf_counter() - start
    errs = {f"{a}-{b}": round(got[a, b] - v, 3) for (a, b), v in expected.items()}
    ok = all(abs(e) <= 0.05 for e in errs.values()) and elapsed < 1.0
    verdict(1, title, ok, f"source={path.name} errors={errs} time={elapsed:.3f}s")


# 2 -------------------------------------------------------------------------

def test_criterion_2_distance_summary():
    title = "CD quartiles/median/mean/MAD within 0.5, GD median within 30 km, under 5 s"
    path = real_file("hofstede")
    if path is None:
        missing_data(2, title, ["hofstede"])
    start = time.perf_counter()
    raw = load_hofstede(path)
    profiles = apply_overrides(raw, [o for o in DEFAULT_OVERRIDES if o.country in raw])
    codes, D = pairwise_cultural_distances(profiles)
    iu = np.triu_indices(len(codes), 1)
    cd = robust_summary(D[iu])
    caps = load_capitals(real_file("capitals"), countries=codes)
    gd = robust_summary(distance_matrix_km(codes, caps)[iu])
    elapsed = time.perf_counter() - start
    checks = {
        "lower_quartile": (cd.lower_quartile, 61.58, 0.5),
        "upper_quartile": (cd.upper_quartile, 93.38, 0.5),
        "median": (cd.median, 78.02, 0.5),
        "mean": (cd.mean, 77.23, 0.5),
        "mad": (cd.mad, 23.32, 0.5),
        "gd_median_km": (gd.median, 6347, 30),
    }
    bad = {k: round(v, 2) for k, (v, want, tol) in checks.items() if abs(v - want) > tol}
    ok = not bad and elapsed < 5.0 and len(iu[0]) == 4278
    verdict(2, title, ok, f"pairs={len(iu[0])} off={bad or 'none'} time={elapsed:.2f}s")


# 3 -------------------------------------------------------------------------

def _oracle_pairs(rng):
    pairs = []
    for _ in range(950):
        la = np.degrees(np.arcsin(rng.uniform(-1, 1, 2)))
        lo = rng.uniform(-180, 180, 2)
        pairs.append((la[0], lo[0], la[1], lo[1]))
    for _ in range(50):
        la1 = float(np.degrees(np.arcsin(rng.uniform(-1, 1))))
        lo1 = float(rng.uniform(-180, 180))
        la2 = float(np.clip(-la1 + rng.uniform(-0.5, 0.5), -90, 90))
        lo2 = (lo1 + 360 - rng.uniform(0, 0.5)) % 360 - 180
        pairs.append((la1, lo1, la2, lo2))
    return pairs


def test_criterion_3_geodesics():
    title = "capital geodesics within 10 km; solver vs quadrature oracle within 1 mm, under 10 s"
    start = time.perf_counter()
    caps = load_capitals()
    expected = {("AUT", "SVK"): 56, ("EST", "FIN"): 83, ("CAN", "USA"): 734, ("NZL", "ESP"): 19851}
    errs = {f"{a}-{b}": round(capital_distance_km(a, b, caps) - km, 1) for (a, b), km in expected.items()}
    pairs = _oracle_pairs(np.random.default_rng(2024))
    worst = max(abs(inverse_geodesic((a, b), (c, d)) - geodesic_quadrature(a, b, c, d)) for a, b, c, d in pairs)
    elapsed = time.perf_counter() - start
    ok = all(abs(e) <= 10 for e in errs.values()) and worst <= 1e-3 and elapsed < 10
    verdict(3, title, ok, f"capital_errors_km={errs} oracle_max_err_m={worst:.2e} n={len(pairs)} time={elapsed:.2f}s")


# 4 -------------------------------------------------------------------------

def test_criterion_4_rank_test_oracles():
    title = "exact p-values equal full enumeration (n<=8), published small cases, under 30 s"
    start = time.perf_counter()
    checked = mismatches = 0
    for n in range(2, 9):
        for n1 in range(1, n):
            for ranks in itertools.combinations(range(1, n + 1), n1):
                x = list(ranks)
                y = [r for r in range(1, n + 1) if r not in ranks]
                for alt in ("greater", "less"):
                    checked += 1
                    mismatches += mann_whitney_u(x, y, alt).p_value != enumerate_rank_sum_p(x, y, alt)
    for n in range(1, 9):
        for signs in itertools.product((-1, 1), repeat=n):
            x = [s * (i + 1) for i, s in enumerate(signs)]
            for alt in ("greater", "less"):
                checked += 1
                mismatches += wilcoxon_signed_rank(x, 0, alt).p_value != enumerate_signed_rank_p(x, 0, alt)
    p_mw = mann_whitney_u([1, 2, 3], [4, 5, 6], "less").p_value
    p_sr = wilcoxon_signed_rank([1, 2, 3], 0, "greater").p_value
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and p_mw == 0.05 and p_sr == 0.125 and elapsed < 30
    verdict(4, title, ok, f"cases={checked} mismatches={mismatches} mw={p_mw} sr={p_sr} time={elapsed:.2f}s")


# 5 -------------------------------------------------------------------------

def _counts(corpus):
    s = validate_corpus(corpus)
    return (s.n_countries, s.n_oecd, s.n_non_oecd_to_oecd, s.n_oecd_to_oecd, s.n_flow_pairs)


def test_criterion_5_counts_synthetic(tmp_path):
    title = "counts 93/36/2052+1260=3312 on a synthetic corpus of the same shape"
    corpus = load_corpus(write_corpus(make_synthetic_corpus(seed=3), tmp_path))
    got = _counts(corpus)
    n_records = len(build_flow_matrix(corpus))
    verdict("5 (synthetic)", title, got == (93, 36, 2052, 1260, 3312) and n_records == 3312,
            f"counts={got} flow_records={n_records}")


def test_criterion_5_counts_real(real_corpus):
    title = "counts 93/36/2052+1260=3312 on the real corpus"
    if real_corpus is None:
        missing_data("5 (real)", title, ["hofstede", "stock", "population"])
    try:
        got = _counts(real_corpus)
    except Exception as exc:  # a validation error is itself the failure detail
        verdict("5 (real)", title, False, str(exc))
    verdict("5 (real)", title, got == (93, 36, 2052, 1260, 3312), f"counts={got}")


# 6 -------------------------------------------------------------------------

def _within(value, target, rel=0.25):
    return value is not None and abs(value - target) <= rel * target


def grand_median_checks(gm):
    inflow, outflow, geo = gm["inflow"], gm["outflow_oecd"], gm["geodesic_km"]
    values = {
        "inflow_grand": (inflow["grand"], 1.51),
        "inflow_close": (inflow["close"], 1.54),
        "inflow_mid": (inflow["mid_distant"], 1.30),
        "inflow_distant": (inflow["distant"], 2.36),
        "outflow_grand": (outflow["grand"], 0.98),
        "outflow_close": (outflow["close"], 1.37),
        "outflow_mid": (outflow["mid_distant"], 0.74),
        "outflow_distant": (outflow["distant"], 1.20),
        "gd_close": (geo["close"], 3227),
        "gd_mid": (geo["mid_distant"], 6710),
        "gd_distant": (geo["distant"], 7733),
    }
    off = {k: (None if v is None else round(v, 2)) for k, (v, t) in values.items() if not _within(v, t)}
    try:
        orderings = (
            inflow["distant"] > inflow["close"] > inflow["mid_distant"]
            and outflow["close"] > outflow["distant"] > outflow["mid_distant"]
        )
    except TypeError:
        orderings = False
    return off, orderings


NAMED_OUTCOMES = [
    ("immigration", "CAN", "toward_distant"),
    ("immigration", "USA", "toward_distant"),
    ("geotrend", "NZL", "decreasing"),
    ("geotrend", "AUS", "decreasing"),
    ("geotrend", "JPN", "none"),
    ("geotrend", "TUR", "none"),
    ("geotrend", "PRT", "none"),
    ("inflow_significance", "LTU", "not_significant"),
    ("emigration", "ESP", "toward_distant"),
    ("emigration", "PRT", "toward_distant"),
    ("emigration", "SVN", "toward_distant"),
    ("emigration", "TUR", "toward_distant"),
    ("emigration", "KOR", "toward_distant"),
    ("emigration", "ZAF", "toward_close"),
    ("emigration", "TTO", "toward_close"),
]


def named_outcomes(analysis):
    got = {}
    for battery, country, want in NAMED_OUTCOMES:
        try:
            if battery == "immigration":
                have = analysis.immigration_bias_test(country).direction
            elif battery == "geotrend":
                have = analysis.geodesic_trend_test(country).direction
            elif battery == "emigration":
                have = analysis.emigration_bias_test(country).direction
            else:
                res = analysis.migration_significance_test(country, "inflow")
                have = "significant" if res.p_value < 0.1 else "not_significant"
        except Exception as exc:
            have = f"error({type(exc).__name__})"
        got[(battery, country)] = (have, want)
    return got


def test_criterion_6_grand_medians(real_analysis):
    title = "grand medians within 25% with exact orderings (orderings + criterion 7 as fallback)"
    if real_analysis is None:
        missing_data(6, title, ["hofstede", "stock", "population"])
    off, orderings = grand_median_checks(real_analysis.grand_medians())
    hits = sum(h == w for h, w in named_outcomes(real_analysis).values())
    fallback = orderings and hits >= 0.8 * len(NAMED_OUTCOMES)
    ok = orderings and (not off or fallback)
    verdict(6, title, ok, f"orderings={'hold' if orderings else 'broken'} off_by_more_than_25pct={off or 'none'} "
                          f"criterion7_hits={hits}/{len(NAMED_OUTCOMES)}")


# 7 -------------------------------------------------------------------------

def test_criterion_7_directional_findings(real_analysis):
    title = "at least 80% of the 15 named directional outcomes at p<0.1"
    if real_analysis is None:
        missing_data(7, title, ["hofstede", "stock", "population"])
    got = named_outcomes(real_analysis)
    misses = {f"{b}:{c}": h for (b, c), (h, w) in got.items() if h != w}
    hits = len(got) - len(misses)
    verdict(7, title, hits >= 0.8 * len(got), f"hits={hits}/{len(got)} misses={misses or 'none'}")


# 8 -------------------------------------------------------------------------

def _metric_axioms(n=10_000, seed=8):
    rng = np.random.default_rng(seed)
    scores = rng.integers(0, 101, size=(n, 3, 6)).astype(float)
    bad = 0
    for a, b, c in scores:
        pa, pb, pc = (CultureProfile("QAA", *v) for v in (a, b, c))
        ab, ba = cultural_distance(pa, pb), cultural_distance(pb, pa)
        ok = (
            ab >= 0 and ab == ba and cultural_distance(pa, pa) == 0 and ab <= MAX_DISTANCE + 1e-9
            and ab <= cultural_distance(pa, pc) + cultural_distance(pc, pb) + 1e-9
            and (ab > 0) == (tuple(a) != tuple(b))
        )
        bad += not ok
    return bad


def _rank_invariance():
    analysis = CultureMigrationAnalysis().fit(make_synthetic_corpus(seed=5))
    before = analysis.run_batteries()
    changed = 0
    for fn in (np.log1p, lambda v: v**3 + v, lambda v: 5 * np.sqrt(v) + 1):
        moved = copy.copy(analysis).set_flows(
            dataclasses.replace(r, per_million_host=float(fn(r.per_million_host)),
                                per_million_origin=float(fn(r.per_million_origin)))
            for r in analysis.flows_
        )
        after = {
            "geotrend": {h: moved.geodesic_trend_test(h) for h in moved.oecd_},
            "immigration": {h: moved.immigration_bias_test(h) for h in moved.oecd_},
            "emigration": {o: moved.emigration_bias_test(o) for o in moved.codes_},
        }
        for name, results in after.items():
            for focal, res in results.items():
                old = before[name][focal]
                if fn(0.0) != 0.0 and old.note == "all values zero":
                    continue
                same = (res.direction, res.p_greater, res.p_less) == (old.direction, old.p_greater, old.p_less)
                same = same and (res.test is None) == (old.test is None)
                if res.test is not None and old.test is not None:
                    same = same and res.test.statistic == old.test.statistic
                changed += not same
    return changed


def _scaling():
    rng = np.random.default_rng(1)
    bad = 0
    for flow, pop, k in zip(rng.uniform(0, 1e5, 2000), rng.uniform(1e4, 1e9, 2000), rng.integers(-30, 30, 2000)):
        bad += normalize_flow(flow, pop * 2.0**int(k)) != normalize_flow(flow, pop) * 2.0**-int(k)
    return bad


def _determinism(tmp_path):
    data = write_corpus(make_synthetic_corpus(seed=9), tmp_path / "in")
    outs = [tmp_path / "run1", tmp_path / "run2"]
    codes = [cli_main(["reproduce", "--data-dir", str(data), "--out", str(o)]) for o in outs]
    files = sorted(p.name for p in outs[0].iterdir() if p.name != METADATA_FILE)
    differing = [f for f in files if (outs[0] / f).read_bytes() != (outs[1] / f).read_bytes()]
    return codes, files, differing


def test_criterion_8_properties(tmp_path):
    title = "metric axioms x10000, rank invariance, normalisation scaling, byte-identical reproduce"
    axioms = _metric_axioms()
    rank = _rank_invariance()
    scaling = _scaling()
    codes, files, differing = _determinism(tmp_path)
    ok = axioms == 0 and rank == 0 and scaling == 0 and codes == [0, 0] and not differing and len(files) >= 10
    verdict(8, title, ok, f"axiom_violations={axioms} rank_changes={rank} scaling_violations={scaling} "
                          f"reproduce_exit={codes} files={len(files)} differing={differing or 'none'}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider", "--no-header"]))
