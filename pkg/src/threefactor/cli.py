"""Command-line entry point.

Exit codes: 0 success, 2 premise failure (or usage error), 3 data error,
4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .casestudy import CaseStudyConfig, format_verdict, load_config, parse_period, run_case_study
from .classify import relative_effects_for, strip_subregion, subregion_of
from .core import FACTORS, economy_from_text, ews, intensity_ranking, sign_char
from .errors import DataError, ModelError, PremiseFailure, SamplerExhausted
from .hat import reciprocity_check, relative_output_effects, rybczynski_matrix, stolper_samuelson_matrix
from .histdata import (
    check_period_totals,
    compare_sources,
    compute_factor_price_changes,
    deflated_series,
    lambda_estimates,
    load_dataset,
    migration_analysis,
    moving_average,
    yield_series,
    yield_trend_sign,
)
from .validation import parse_constraints, run_validation

EXIT_OK = 0
EXIT_PREMISE = 2
EXIT_DATA = 3
EXIT_VALIDATION = 4


def _clean(obj):
    """Make ``obj`` JSON-safe: numpy scalars to Python, NaN to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, Path):
        return str(obj)
    return obj


def to_json(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _emit(args, text: str, structured: dict) -> None:
    body = to_json(structured) if args.format == "structured" else text.rstrip("\n") + "\n"
    if args.out:
        Path(args.out).write_text(body, encoding="utf-8")
    else:
        sys.stdout.write(body)


def _dataset_dir(args) -> Path | None:
    return Path(args.dataset_dir) if getattr(args, "dataset_dir", None) else None


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_case_study(args) -> int:
    config = load_config(args.config) if args.config else CaseStudyConfig()
    if args.dataset_dir:
        config = CaseStudyConfig(**{**config.__dict__, "data_dir": Path(args.dataset_dir)})
    if args.period:
        config = CaseStudyConfig(**{**config.__dict__, "period": parse_period(args.period)})
    verdict = run_case_study(config)
    _emit(args, format_verdict(verdict), verdict.to_dict())
    return EXIT_OK


def analyze_economy(text: str) -> dict:
    econ = economy_from_text(text)
    report = ews(econ)
    ranking = intensity_ranking(econ.distributive, econ.income.goods)
    r = rybczynski_matrix(econ)
    ss = stolper_samuelson_matrix(econ)
    out = {
        "theta": econ.theta,
        "lambda": econ.lam,
        "ews_matrix": report.g,
        "ews_labels": report.labels,
        "ratio_vector": {"S_prime": report.ratio.s_prime, "U_prime": report.ratio.u_prime, "quadrant": report.ratio.quadrant},
        "intensity_order": [f.name for f in ranking.order],
        "middle_intensive_in_sector1": ranking.middle_intensive_in_1,
        "rybczynski": r.to_dict(),
        "rybczynski_signs": [[sign_char(int(s)) for s in row] for row in r.signs()],
        "stolper_samuelson": {f"w_{f}/p_{j + 1}": ss[i, j] for i, f in enumerate(FACTORS) for j in range(2)},
        "reciprocity_gap": reciprocity_check(econ),
        "relative_output_signs": relative_output_effects(r).signs(),
        "subregion": None,
        "strip_band": None,
    }
    if ranking.is_canonical and report.ratio.quadrant == 4:
        try:
            sub = subregion_of(econ)
            out["subregion"] = sub.value
            out["theorem_relative_effects"] = {k: sign_char(v) for k, v in relative_effects_for(sub).items()}
        except ModelError as exc:
            out["subregion_error"] = str(exc)
        out["strip_band"] = strip_subregion(econ).value
    return out


def _format_analysis(a: dict) -> str:
    lines = ["EWS matrix g[i, h] (rows and columns T, K, L)"]
    for i, f in enumerate(FACTORS):
        lines.append(f"  {f}: " + " ".join(f"{v:+.6f}" for v in a["ews_matrix"][i]))
    lines.append("pairs: " + ", ".join(f"{k} {v}" for k, v in a["ews_labels"].items()))
    rv = a["ratio_vector"]
    lines.append(f"(S', U') = ({rv['S_prime']:+.6f}, {rv['U_prime']:+.6f}), quadrant {rv['quadrant']}")
    lines.append(f"intensity order: {' > '.join(a['intensity_order'])}")
    lines.append("Rybczynski elasticities X_j*/V_i*")
    for j in (1, 2):
        cells = "  ".join(f"{a['rybczynski'][f'X{j}/V_{f}']:+.6f}" for f in FACTORS)
        lines.append(f"  X{j}: {cells}   signs {' '.join(a['rybczynski_signs'][j - 1])}")
    lines.append("Stolper-Samuelson elasticities w_i*/p_j*")
    for f in FACTORS:
        lines.append(f"  w_{f}: " + "  ".join(f"{a['stolper_samuelson'][f'w_{f}/p_{j}']:+.6f}" for j in (1, 2)))
    lines.append(f"reciprocity gap: {a['reciprocity_gap']:.3g}")
    lines.append("relative output effects: " + ", ".join(f"{k} {v}" for k, v in a["relative_output_signs"].items()))
    if a["subregion"]:
        lines.append(f"subregion: {a['subregion']} (strip band {a['strip_band']})")
    return "\n".join(lines)


def cmd_analyze(args) -> int:
    try:
        text = Path(args.economy).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(str(exc)) from exc
    try:
        a = analyze_economy(text)
    except (ValueError, ModelError) as exc:
        raise DataError(f"{args.economy}: {exc}") from exc
    _emit(args, _format_analysis(a), a)
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.n < 1:
        return _usage_error("--n must be at least 1")
    try:
        constraints = parse_constraints(args.constraints)
    except ValueError as exc:
        raise SystemExit(_usage_error(str(exc))) from exc
    try:
        summary = run_validation(args.seed, args.n, constraints, shocks_per_economy=args.shocks, oracle=not args.no_oracle)
    except SamplerExhausted as exc:
        print(f"sampler exhausted: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    _emit(args, summary.format(), summary.to_dict())
    return EXIT_OK if summary.passed else EXIT_VALIDATION


def data_report(dataset_dir: Path | None, period: tuple[str, str]) -> dict:
    ds = load_dataset(dataset_dir)
    fp = compute_factor_price_changes(ds["wage"], ds["rice_price"], ds["land_price"], ds["shirting_price"], period)
    trends = {}
    for crop in ("rice", "cotton"):
        try:
            trends[crop] = yield_trend_sign(ds[f"{crop}_production"], ds[f"{crop}_area"], crop, period).to_dict()
        except DataError as exc:
            trends[crop] = {"error": str(exc)}
    lam = lambda_estimates(ds.crops, None, ds.labor)
    mig = ds.migration
    return {
        "period": list(period),
        "factor_prices": fp.to_dict(),
        "yield_trends": trends,
        "lambdas": lam.to_dict(),
        "source_comparison": compare_sources(mig).to_dict(),
        "migration": [migration_analysis(mig, p).to_dict() for p in (("1920-21", "1926-27"), ("1900", "1929-30"))],
        "printed_period_totals": [
            {"start": pt.start, "end": pt.end, "printed": pt.net, "computed": c, "match": ok} for pt, c, ok in check_period_totals(mig)
        ],
        "provenance": ds.provenance(),
    }


def _format_data(d: dict) -> str:
    fp = d["factor_prices"]
    lines = [f"Period {d['period'][0]} to {d['period'][1]}"]
    for k in ("P", "X", "Z"):
        c = fp[k]
        lines.append(f"  {k} = {c['percent']:+.2f}%  [{c['provenance']}]  {c['formula']}")
    lines.append(f"  Z + P = {fp['Z_plus_P']:+.2f}%  [computed]")
    for crop, t in d["yield_trends"].items():
        if "error" in t:
            lines.append(f"  {crop} yield: {t['error']}")
        else:
            lines.append(
                f"  {crop} yield (3-year average) {t['start_value']:.1f} -> {t['end_value']:.1f} kg/rai, "
                f"trend {sign_char(t['trend'])}, land coefficient {sign_char(t['coefficient_sign'])}  [{d['provenance'][crop + '_production']}]"
            )
    lm = d["lambdas"]
    lines.append(f"  lambda_T1 = {lm['exportable_area']:.0f} / {lm['total_area']:.0f} = {lm['lambda_T1']:.4f}  [{d['provenance']['crops']}]")
    lines.append(f"  lambda_L1 = {lm['agricultural_labor']:.0f} / {lm['total_labor']:.0f} = {lm['lambda_L1']:.4f}  [{d['provenance']['labor']}]")
    sc = d["source_comparison"]
    lines.append(
        f"  net arrivals, annual sources: {sc['skinner'][2]:,.0f} vs {sc['yearbook'][2]:,.0f}, difference {sc['difference_in_net']:,.0f}  [{d['provenance']['migration']}]"
    )
    for m in d["migration"]:
        lines.append(f"  {m['start']} to {m['end']}: net {m['net']:.1f} thousand / growth {m['growth']:.0f} thousand = {m['ratio_percent']:.1f}%")
    bad = [p for p in d["printed_period_totals"] if not p["match"]]
    lines.append(f"  printed period totals: {len(d['printed_period_totals']) - len(bad)} of {len(d['printed_period_totals'])} reproduced")
    return "\n".join(lines)


def cmd_data(args) -> int:
    period = parse_period(args.period) if args.period else ("1920", "1927")
    d = data_report(_dataset_dir(args), period)
    _emit(args, _format_data(d), d)
    return EXIT_OK


def plot_series(dataset_dir: Path | None) -> dict[str, list[tuple[str, float, float | None]]]:
    """Figure-style series: (year label, value, 3-year moving average or None)."""
    ds = load_dataset(dataset_dir)
    series = deflated_series(ds["wage"], ds["rice_price"], ds["land_price"], ds["shirting_price"])
    series["rice_yield"] = yield_series(ds["rice_production"], ds["rice_area"], "rice")
    series["cotton_yield"] = yield_series(ds["cotton_production"], ds["cotton_area"], "cotton")
    out = {}
    for name, table in series.items():
        ma = dict(moving_average(table, 3).items()) if len(table) >= 3 else {}
        out[name] = [(lab, val, ma.get(lab)) for lab, val in table.items()]
    return out


def cmd_export_plot(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, rows in plot_series(_dataset_dir(args)).items():
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["year_label", "value", "moving_average_3"])
        for lab, val, ma in rows:
            w.writerow([lab, repr(val), "" if ma is None else repr(ma)])
        (out_dir / f"{name}.csv").write_text(buf.getvalue(), encoding="utf-8")
        print(f"wrote {out_dir / (name + '.csv')}")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def _usage_error(msg: str) -> int:
    print(f"threefactor: error: {msg}", file=sys.stderr)
    return EXIT_PREMISE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="threefactor", description="Three-factor two-good trade model: comparative statics and the Thailand case study.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=True, fmt=True):
        if data:
            p.add_argument("--dataset-dir", help="dataset root (defaults to $THREEFACTOR_DATA, then the bundled data)")
        if fmt:
            p.add_argument("--format", choices=("text", "structured"), default="text")
        p.add_argument("--out", help="write the report to this path instead of stdout")

    p = sub.add_parser("case-study", help="run the full classification chain on the historical data")
    p.add_argument("--config", help="INI configuration file")
    p.add_argument("--period", help="START:END, e.g. 1920:1927")
    common(p)
    p.set_defaults(func=cmd_case_study)

    p = sub.add_parser("analyze", help="EWS report and sign matrices for one economy document")
    p.add_argument("economy", help="economy document (INI)")
    common(p, data=False)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("validate", help="check the classification results against sampled economies")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--constraints", default="quadrant-iv", help="comma-separated: quadrant-iv, substitutes-only, middle-sector1, middle-sector2, land-share-2=X, none")
    p.add_argument("--shocks", type=int, default=20, help="random shocks per economy for the price-premise checks")
    p.add_argument("--no-oracle", action="store_true", help="skip the finite-difference comparison")
    common(p, data=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("data", help="historical-data computations only")
    p.add_argument("--period", help="START:END, e.g. 1920:1927")
    common(p)
    p.set_defaults(func=cmd_data)

    p = sub.add_parser("export-plot", help="write figure-style series as CSV files")
    p.add_argument("--dataset-dir", help="dataset root (defaults to $THREEFACTOR_DATA, then the bundled data)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_export_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PremiseFailure as exc:
        print(f"premise failed: {exc}", file=sys.stderr)
        return EXIT_PREMISE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"threefactor: error: {exc}", file=sys.stderr)
        return EXIT_PREMISE


if __name__ == "__main__":
    sys.exit(main())
