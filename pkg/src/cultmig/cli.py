"""Command line interface.

Exit status: 0 on success, 2 on invalid input or configuration, 3 when a
file cannot be read or written or remote data cannot be fetched. Every
failure prints a single line starting with ``error:`` to stderr.
"""

import argparse
import logging
import sys

import numpy as np

from . import __version__
from .analysis import PAPER_THRESHOLDS, CultureMigrationAnalysis, ProximityStratifier, run_analysis
from .config import THRESHOLD_MODES, build_config
from .culture import DEFAULT_OVERRIDES, apply_overrides, pairwise_cultural_distances
from .exceptions import CultmigError, FetchError
from .geodesy import capital_distance_km
from .ingest import (
    data_path,
    load_capitals,
    load_corpus,
    load_hofstede,
    resolve_country,
    validate_corpus,
    write_population_csv,
)
from .report import write_metadata, write_report, summary_line

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 2, 3


def _global_options(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--data-dir", default=default,
                        help="input directory (default: $CULTMIG_DATA_DIR or ./data)")
    parser.add_argument("--config", default=default, help="TOML file of key = value settings")
    parser.add_argument("--out", default=default, help="output directory for reproduce")
    parser.add_argument("--thresholds", choices=THRESHOLD_MODES, default=default,
                        help="recompute quartile cut-offs or pin them to 61.6/93.4")
    parser.add_argument("--flow-estimator", choices=("positive-diff", "signed-diff"),
                        default=default)
    parser.add_argument("--no-sparse-rule", action="store_const", const=False,
                        dest="sparse_rule", default=default,
                        help="do not merge the mid-distant group into sparse groups")
    parser.add_argument("-v", "--verbose", action="store_true",
                        default=argparse.SUPPRESS if suppress else False)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cultmig",
        description="Cultural distance, geodesic distance and migration flow analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        p = sub.add_parser(name, **kw)
        _global_options(p, suppress=True)
        return p

    add("reproduce", help="run the full analysis and write report files")
    add("validate", help="load and check all inputs, print corpus counts")

    p = add("pair", help="cultural and geodesic distance of two countries")
    p.add_argument("country_a")
    p.add_argument("country_b")

    p = add("test", help="run one battery for one country")
    who = p.add_mutually_exclusive_group(required=True)
    who.add_argument("--host")
    who.add_argument("--origin")
    p.add_argument("battery", choices=("immigration", "emigration", "geotrend", "significance"))

    p = add("fetch-population", help="download World Bank population into population.csv")
    p.add_argument("--countries", nargs="+", help="ISO codes (default: all in hofstede.csv)")
    p.add_argument("--cache-dir", help="response cache (default: <data-dir>/.cache/worldbank)")
    p.add_argument("--refresh", action="store_true", help="ignore cached responses")
    return parser


def _config(args):
    return build_config(
        getattr(args, "config", None),
        data_dir=args.data_dir,
        out_dir=args.out,
        thresholds=args.thresholds,
        flow_estimator=args.flow_estimator,
        sparse_rule=args.sparse_rule,
    )


def _fit(cfg):
    corpus = load_corpus(cfg.data_dir)
    return corpus, CultureMigrationAnalysis(**cfg.analysis_params()).fit(corpus)


def cmd_reproduce(args, cfg):
    corpus = load_corpus(cfg.data_dir)
    stats = validate_corpus(corpus)
    analysis, report = run_analysis(corpus, **cfg.analysis_params())
    report.stats = stats.as_dict()
    report.config = {**cfg.echo(), **analysis.get_params()}
    report.config.pop("out_dir")
    report.config.pop("data_dir")
    write_report(report, cfg.out_dir, flows=analysis.flows_)
    write_metadata(cfg.out_dir, sys.argv)
    print(summary_line(report))
    print(f"wrote {cfg.out_dir}")
    return EXIT_OK


def cmd_validate(args, cfg):
    stats = validate_corpus(load_corpus(cfg.data_dir))
    print(" ".join(f"{k}={v}" for k, v in stats.as_dict().items()))
    return EXIT_OK


def cmd_pair(args, cfg):
    profiles = load_hofstede(data_path("hofstede", cfg.data_dir))
    profiles = apply_overrides(profiles, [o for o in DEFAULT_OVERRIDES if o.country in profiles])
    a = resolve_country(args.country_a, profiles)
    b = resolve_country(args.country_b, profiles)
    capitals = load_capitals(data_path("capitals", cfg.data_dir), countries=[a, b])
    codes, D = pairwise_cultural_distances(profiles)
    pinned = PAPER_THRESHOLDS if cfg.thresholds == "paper" else None
    stratifier = ProximityStratifier(thresholds=pinned).fit(D[np.triu_indices(len(codes), 1)])
    cd = D[codes.index(a), codes.index(b)]
    gd = capital_distance_km(a, b, capitals)
    label = stratifier.transform([cd])[0]
    short = {"mid_distant": "mid"}.get(label, label)
    print(f"CD={cd:.2f} GD={gd:.0f}km class={short}")
    return EXIT_OK


def cmd_test(args, cfg):
    corpus, analysis = _fit(cfg)
    focal = resolve_country(args.host or args.origin, corpus.profiles)
    if args.battery == "significance":
        res = analysis.migration_significance_test(focal, "inflow" if args.host else "outflow")
        print(f"country={focal} W={res.statistic:g} n={res.n1} p={res.p_value:.4g} "
              f"method={res.method} code={res.significance_code or '-'}")
        return EXIT_OK
    if args.battery == "emigration":
        if not args.origin:
            raise CultmigError("the emigration battery takes --origin")
        res = analysis.emigration_bias_test(focal)
    else:
        if not args.host:
            raise CultmigError(f"the {args.battery} battery takes --host")
        res = (analysis.geodesic_trend_test if args.battery == "geotrend"
               else analysis.immigration_bias_test)(focal)
    fmt = "{:.0f}" if args.battery == "geotrend" else "{:.2f}"
    med = " ".join(
        f"{k}={'NA' if v is None else fmt.format(v)}(n={res.counts[k]})" for k, v in res.medians.items()
    )
    print(f"country={focal} battery={args.battery} {med}")
    if res.test is None:
        print(f"no test: {res.note} direction=none")
    else:
        print(
            f"U={res.test.statistic:g} p_greater={res.p_greater:.4g} p_less={res.p_less:.4g} "
            f"direction={res.direction} code={res.significance_code or '-'} "
            f"sparse_rule={'yes' if res.sparse_rule_applied else 'no'}"
        )
    return EXIT_OK


def cmd_fetch_population(args, cfg):
    from .worldbank import fetch_population

    if args.countries:
        codes = [resolve_country(c) for c in args.countries]
    else:
        codes = list(load_hofstede(data_path("hofstede", cfg.data_dir)))
    cache = args.cache_dir or cfg.data_dir / ".cache" / "worldbank"
    series = fetch_population(codes, cache, refresh=args.refresh)
    cfg.data_dir.mkdir(parents=True, exist_ok=True)
    out = data_path("population", cfg.data_dir)
    write_population_csv(series, out)
    print(f"wrote {len(series)} series to {out}")
    return EXIT_OK


COMMANDS = {
    "reproduce": cmd_reproduce,
    "validate": cmd_validate,
    "pair": cmd_pair,
    "test": cmd_test,
    "fetch-population": cmd_fetch_population,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(name)s: %(message)s",
    )
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except FetchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CultmigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        where = f"{exc.filename}: " if getattr(exc, "filename", None) else ""
        print(f"error: {where}{exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
