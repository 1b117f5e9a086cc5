"""Rendering an ``AnalysisReport`` to JSON and CSV files.

Numbers are rounded to fixed widths (cultural distance and flows to two
decimals, geodesic distance to whole kilometres, p-values to four
significant digits) so that repeated runs produce byte-identical files.
Run metadata with timestamps goes to a separate sidecar file.
"""

import csv
import json
import platform
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .stats import MAD_SCALE

REPORT_FILE = "report.json"
METADATA_FILE = "run_metadata.json"


def cd2(x):
    return None if x is None else round(float(x), 2)


def km(x):
    return None if x is None else int(round(float(x)))


def p4(p):
    return None if p is None else float(f"{p:.4g}")


def _summary(s, fmt):
    out = {k: fmt(v) for k, v in s.as_dict().items()}
    # both MAD conventions, so either can be compared against published values
    out["mad_unscaled"] = fmt(s.mad / MAD_SCALE)
    return out


def _pair_row(a, b, cd, gd):
    return {"country_a": a, "country_b": b, "gd_km": km(gd), "cd": cd2(cd)}


def _test(result):
    if result is None:
        return None
    return {
        "statistic": round(result.statistic, 4),
        "p_value": p4(result.p_value),
        "alternative": result.alternative,
        "n1": result.n1,
        "n2": result.n2,
        "method": result.method,
        "significance_code": result.significance_code,
    }


def _directional(r, fmt, significance=None):
    row = {
        "focal": r.focal,
        "medians": {k: fmt(v) for k, v in r.medians.items()},
        "counts": dict(r.counts),
        "p_greater": p4(r.p_greater),
        "p_less": p4(r.p_less),
        "direction": r.direction,
        "significance_code": r.significance_code,
        "sparse_rule_applied": r.sparse_rule_applied,
        "test": _test(r.test),
    }
    if r.note:
        row["note"] = r.note
    if significance is not None:
        row["flow_significance"] = _test(significance)
    return row


def _reference(ref, fmt):
    return {k: (v if k == "n" else fmt(v)) for k, v in ref.items()}


def _matrix(rows):
    return [
        {
            "focal": r["focal"],
            "counterparts": r["counterparts"],
            "cd": [cd2(v) for v in r["cd"]],
            "proximity": r["proximity"],
        }
        for r in rows
    ]


def _config_echo(config):
    out = {}
    for k, v in sorted(config.items()):
        out[k] = list(v) if isinstance(v, tuple) else v
    return out


def report_payload(report):
    """JSON-ready dict of the report with fixed-width rounding applied."""
    figs = report.figures
    bat = report.batteries
    payload = {
        "thresholds": {
            "close_max": cd2(report.thresholds.close_max),
            "distant_min": cd2(report.thresholds.distant_min),
        },
        "stats": report.stats,
        "table1": {
            "cultural_distance": _summary(report.table1["cultural_distance"], cd2),
            "geodesic_distance_km": _summary(report.table1["geodesic_distance_km"], km),
            "n_pairs": report.table1["n_pairs"],
        },
        "table2": [_pair_row(*row) for row in report.table2],
        "table3": [_pair_row(*row) for row in report.table3],
        "fig1": _matrix(figs["fig1"]),
        "fig2": _matrix(figs["fig2"]),
        "fig3": {
            "reference": _reference(figs["fig3"]["reference"], km),
            "rows": [_directional(r, km) for r in figs["fig3"]["rows"]],
        },
        "fig4": {
            "reference": _reference(figs["fig4"]["reference"], cd2),
            "rows": [
                _directional(r, cd2, bat["inflow_significance"][r.focal])
                for r in figs["fig4"]["rows"]
            ],
        },
    }
    for name in ("fig5a", "fig5b"):
        payload[name] = {
            "reference": _reference(figs[name]["reference"], cd2),
            "rows": [
                _directional(r, cd2, bat["outflow_significance"][r.focal])
                for r in figs[name]["rows"]
            ],
        }
    payload["config_echo"] = _config_echo(report.config)
    return payload


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_report(report, out_dir, flows=None):
    """Write report.json plus flat CSVs into ``out_dir``; returns the payload."""
    from .flows import write_flows_csv

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = report_payload(report)
    with open(out / REPORT_FILE, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=False)
        fh.write("\n")

    t1 = payload["table1"]
    _write_csv(
        out / "table1.csv",
        ["quantity", "min", "lower_quartile", "median", "mean", "upper_quartile", "max", "mad",
         "mad_unscaled"],
        [
            [name] + [_fmt(t1[name][k]) for k in
                      ("min", "lower_quartile", "median", "mean", "upper_quartile", "max", "mad",
                       "mad_unscaled")]
            for name in ("cultural_distance", "geodesic_distance_km")
        ],
    )
    for name in ("table2", "table3"):
        _write_csv(
            out / f"{name}.csv",
            ["country_a", "country_b", "gd_km", "cd"],
            [[r["country_a"], r["country_b"], r["gd_km"], f"{r['cd']:.2f}"] for r in payload[name]],
        )

    for name in ("fig1", "fig2"):
        rows = []
        for r in payload[name]:
            for group in ("close", "mid_distant", "distant"):
                rows.append([r["focal"], group, r["proximity"].count(group)])
        _write_csv(out / f"{name}.csv", ["focal", "group", "n"], rows)

    for name in ("fig3", "fig4", "fig5a", "fig5b"):
        rows = []
        for r in payload[name]["rows"]:
            for group in ("close", "mid_distant", "distant"):
                rows.append([
                    r["focal"], group, r["counts"][group], _fmt(r["medians"][group]),
                    _fmt(r["p_greater"]), _fmt(r["p_less"]), r["direction"],
                    r["significance_code"], int(r["sparse_rule_applied"]),
                ])
        _write_csv(
            out / f"{name}.csv",
            ["focal", "group", "n", "median", "p_greater", "p_less", "direction",
             "significance_code", "sparse_rule_applied"],
            rows,
        )

    if flows is not None:
        write_flows_csv(flows, out / "flows.csv")
    return payload


def write_metadata(out_dir, argv=None):
    meta = {
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "cultmig_version": __version__,
        "python": platform.python_version(),
        "platform": platform.platform(),
        "argv": list(argv or []),
    }
    with open(Path(out_dir) / METADATA_FILE, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def summary_line(report):
    gm = report.grand_medians
    s = report.stats
    parts = [
        f"countries={s.get('n_countries', '')}",
        f"oecd={s.get('n_oecd', '')}",
        f"pairs={s.get('n_flow_pairs', gm['inflow']['n'])}",
        f"grand_median_inflow={_fmt_num(gm['inflow']['grand'], 2)}",
        f"grand_median_outflow={_fmt_num(gm['outflow_oecd']['grand'], 2)}",
        f"grand_median_gd_km={_fmt_num(gm['geodesic_km']['grand'], 0)}",
        f"thresholds={report.thresholds.close_max:.2f}/{report.thresholds.distant_min:.2f}",
    ]
    return " ".join(parts)


def _fmt_num(v, digits):
    return "NA" if v is None else f"{v:.{digits}f}"
