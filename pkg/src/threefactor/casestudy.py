"""End-to-end classification of the Thailand 1920-1927 episode.

The chain runs from bundled historical data to a set of admissible
EWS-ratio subregions and the Rybczynski sign matrix they imply:

1. deflated factor prices and the terms of trade over the period;
2. allocation shares from crop areas and the labor force, and a sector-2
   cost-share scenario consistent with them;
3. the factor-price ordering, which fixes w_T* > w_L* > w_K*;
4. yield trends, which fix the sign of the aggregate land coefficient and
   with it the admissible coefficient-sign triples;
5. the location of the segment that contains (S', U') and its refinement.

Configuration files use INI syntax, for example::

    [case_study]
    period = 1920:1927
    data_dir = /path/to/data

    [shares]
    theta_T1 = 0.22
    theta_K1 = 0.27
    theta_L1 = 0.51
    goods_share_1 = 0.5

    [overrides]
    a_T2 = -
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .classify import (
    ALL_SUBREGIONS,
    LEMMA2_TRIPLES,
    PATTERNS,
    aggregate_sign,
    check_sufficient_ordering,
    corollary_refine,
    from_observed,
    lemma2_admissible,
    relative_effects_for,
    segment_estimate,
    theorem1_pattern,
)
from .core import FACTORS, DistributiveShares, Factor, derive_allocation, intensity_ranking, sign_char
from .errors import Indeterminate, InvalidShares, NotApplicable, PremiseFailure
from .hat import relative_output_signs
from .histdata import Dataset, compute_factor_price_changes, lambda_estimates, load_dataset, migration_analysis, yield_trend_sign

T, K, L = Factor.T, Factor.K, Factor.L

_SIGN_WORDS = {"+": 1, "-": -1, "0": 0, "plus": 1, "minus": -1}


def _parse_sign(raw: str) -> int:
    try:
        return _SIGN_WORDS[raw.strip().lower()]
    except KeyError:
        raise ValueError(f"sign must be one of + - 0, found {raw!r}") from None


def parse_period(raw: str) -> tuple[str, str]:
    start, sep, end = raw.partition(":")
    if not sep or not start.strip() or not end.strip():
        raise ValueError(f"period must look like START:END, found {raw!r}")
    return start.strip(), end.strip()


@dataclass(frozen=True)
class CaseStudyConfig:
    data_dir: Path | None = None
    period: tuple[str, str] = ("1920", "1927")
    theta_sector1: tuple[float, float, float] = (0.22, 0.27, 0.51)
    theta_sector2: tuple[float, float, float] | None = None
    goods_share_1: float = 0.5
    middle_intensive_in: str = "sector1"
    overrides: dict = field(default_factory=dict)
    migration_periods: tuple[tuple[str, str], ...] = (("1920-21", "1926-27"), ("1900", "1929-30"))

    def with_overrides(self, **kw) -> CaseStudyConfig:
        merged = dict(self.overrides)
        merged.update(kw)
        return replace(self, overrides=merged)


_OVERRIDE_KEYS = {"P": float, "X": float, "Z": float, "a_T1": _parse_sign, "a_T2": _parse_sign}


def config_from_text(text: str, base_dir: Path | None = None) -> CaseStudyConfig:
    parser = configparser.ConfigParser()
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ValueError(f"malformed configuration: {exc}") from exc
    kw: dict = {}
    if parser.has_section("case_study"):
        sec = parser["case_study"]
        if "data_dir" in sec:
            p = Path(sec["data_dir"])
            kw["data_dir"] = p if p.is_absolute() or base_dir is None else base_dir / p
        if "period" in sec:
            kw["period"] = parse_period(sec["period"])
        if "middle_intensive_in" in sec:
            kw["middle_intensive_in"] = sec["middle_intensive_in"].strip()
    if parser.has_section("shares"):
        sec = parser["shares"]
        kw["theta_sector1"] = tuple(float(sec.get(f"theta_{f}1", d)) for f, d in zip(FACTORS, (0.22, 0.27, 0.51)))
        if all(f"theta_{f}2" in sec for f in FACTORS):
            kw["theta_sector2"] = tuple(float(sec[f"theta_{f}2"]) for f in FACTORS)
        if "goods_share_1" in sec:
            kw["goods_share_1"] = float(sec["goods_share_1"])
    if parser.has_section("overrides"):
        over = {}
        for key, value in parser["overrides"].items():
            if key not in _OVERRIDE_KEYS:
                raise ValueError(f"unknown override {key!r}")
            over[key] = _OVERRIDE_KEYS[key](value)
        kw["overrides"] = over
    return CaseStudyConfig(**kw)


def load_config(path: str | Path) -> CaseStudyConfig:
    p = Path(path)
    return config_from_text(p.read_text(encoding="utf-8"), p.parent)


def calibrate_sector2(theta_sector1, goods_share_1: float, lambda_T1: float, lambda_L1: float) -> tuple[float, float, float]:
    """Sector-2 cost shares that reproduce the observed land and labor allocations.

    Inverts lam_i1 = theta_1 theta_i1 / (theta_1 theta_i1 + theta_2 theta_i2)
    for land and labor; capital takes the remainder.
    """
    g1 = goods_share_1
    g2 = 1.0 - g1
    t1 = np.asarray(theta_sector1, dtype=float)
    land = g1 * t1[T] * (1 - lambda_T1) / (g2 * lambda_T1)
    labor = g1 * t1[L] * (1 - lambda_L1) / (g2 * lambda_L1)
    capital = 1.0 - land - labor
    if min(land, labor, capital) <= 0:
        raise InvalidShares("no positive sector-2 shares reproduce the allocation estimates")
    return (float(land), float(capital), float(labor))


@dataclass(frozen=True)
class Premise:
    name: str
    passed: bool | None
    detail: str

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class Verdict:
    period: tuple[str, str]
    factor_prices: dict
    lambdas: dict
    shares: dict
    premises: tuple[Premise, ...]
    yield_trends: dict
    a0_signs: tuple[int | None, int | None, int | None]
    admissible_triples: tuple[str, ...]
    segment: dict | None
    quadrant_iv: bool | None
    refinement_checks: dict
    subregions: tuple[str, ...]
    excluded_subregions: tuple[str, ...]
    sign_matrix: list
    sign_provenance: list
    relative_effects: dict
    relative_effects_by_subregion: dict
    share_implication: str
    migration: list
    provenance: dict
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "period": list(self.period),
            "factor_prices": self.factor_prices,
            "lambdas": self.lambdas,
            "shares": self.shares,
            "premises": [p.to_dict() for p in self.premises],
            "yield_trends": self.yield_trends,
            "a0_signs": [sign_char(s) for s in self.a0_signs],
            "admissible_triples": list(self.admissible_triples),
            "segment": self.segment,
            "quadrant_iv": self.quadrant_iv,
            "refinement_checks": self.refinement_checks,
            "subregions": list(self.subregions),
            "excluded_subregions": list(self.excluded_subregions),
            "sign_matrix": [[sign_char(s) for s in row] for row in self.sign_matrix],
            "sign_provenance": self.sign_provenance,
            "relative_effects": {k: _effect_word(v) for k, v in self.relative_effects.items()},
            "relative_effects_by_subregion": self.relative_effects_by_subregion,
            "share_implication": self.share_implication,
            "migration": self.migration,
            "provenance": self.provenance,
            "notes": list(self.notes),
        }


def _effect_word(s: int | None) -> str:
    return {1: "+", -1: "-", 0: "0"}.get(s, "indeterminate")


def _yield_sign(dataset: Dataset, crop: str, period, override: int | None, label: str) -> tuple[int | None, dict]:
    if override is not None:
        return override, {"coefficient": label, "sign": sign_char(override), "source": "override"}
    trend = yield_trend_sign(dataset[f"{crop}_production"], dataset[f"{crop}_area"], crop, period)
    info = trend.to_dict()
    info.update({"coefficient": label, "sign": sign_char(trend.coefficient_sign), "source": "yield trend"})
    return (None if trend.indeterminate else trend.coefficient_sign), info


def run_case_study(config: CaseStudyConfig | None = None, dataset: Dataset | None = None) -> Verdict:
    """Run the full classification chain; failed premises raise PremiseFailure."""
    config = config or CaseStudyConfig()
    dataset = dataset or load_dataset(config.data_dir)
    over = config.overrides
    start, end = config.period
    notes: list[str] = []
    premises: list[Premise] = []

    # 1. factor prices
    fp = compute_factor_price_changes(dataset["wage"], dataset["rice_price"], dataset["land_price"], dataset["shirting_price"], (start, end))
    fp_dict = fp.to_dict()
    P, X, Z = (over.get(k, fp_dict[k]["percent"]) for k in ("P", "X", "Z"))
    for k in ("P", "X", "Z"):
        if k in over:
            fp_dict[k]["percent"] = over[k]
            fp_dict[k]["provenance"] = "override"
    fp_dict["Z_plus_P"] = Z + P

    # 2. allocation shares and the cost-share scenario
    lam = lambda_estimates(dataset.crops, None, dataset.labor)
    theta1 = tuple(float(v) for v in config.theta_sector1)
    if config.theta_sector2 is None:
        theta2 = calibrate_sector2(theta1, config.goods_share_1, lam.lambda_T1, lam.lambda_L1)
        theta2_source = "calibrated from allocation estimates"
    else:
        theta2 = tuple(float(v) for v in config.theta_sector2)
        theta2_source = "configured"
    goods = (config.goods_share_1, 1.0 - config.goods_share_1)
    dist = DistributiveShares.from_columns(theta1, theta2)
    income, alloc = derive_allocation(dist, goods)
    try:
        ranking = intensity_ranking(dist, goods)
    except Indeterminate as exc:
        raise PremiseFailure("intensity_ranking", str(exc)) from exc
    ok = ranking.is_canonical
    premises.append(Premise("intensity_ranking", ok, "theta_T1/theta_T2 > theta_L1/theta_L2 > theta_K1/theta_K2"))
    if not ok:
        raise PremiseFailure("intensity_ranking", f"ranking is {[f.name for f in ranking.order]}, expected T, L, K")
    want_1 = config.middle_intensive_in == "sector1"
    ok = ranking.middle_intensive_in_1 == want_1
    premises.append(Premise("middle_factor_intensity", ok, f"labor used relatively intensively in {config.middle_intensive_in.replace('sector', 'sector ')}"))
    if not ok:
        raise PremiseFailure("middle_factor_intensity", "cost shares contradict the assumed middle-factor intensity")

    # 3. price premises
    dc = from_observed(P / 100.0, X / 100.0, Z / 100.0, income=income)
    ok = P > 0
    premises.append(Premise("terms_of_trade_rise", ok, f"P = {P:+.1f}%"))
    if not ok:
        raise PremiseFailure("terms_of_trade_rise", f"P = {P:+.2f}% is not positive")
    ordering = check_sufficient_ordering(dc, theta1[T], theta2[T])
    ok = ordering.establishes_ranking
    premises.append(Premise("factor_price_ordering", ok, f"X > Z > -P ({X:+.1f} > {Z:+.1f} > {-P:+.1f}) implies X > Z > Y"))
    if not ok:
        raise PremiseFailure("factor_price_ordering", ordering.reason or "X > Z > Y is not established")

    # 4. input-coefficient signs
    a_t1, info1 = _yield_sign(dataset, "rice", (start, end), over.get("a_T1"), "a_T1*")
    a_t2, info2 = _yield_sign(dataset, "cotton", (start, end), over.get("a_T2"), "a_T2*")
    a_t0 = aggregate_sign([a_t1, a_t2])
    try:
        admissible = lemma2_admissible(ranking, dc, known=(a_t0, None, None))
    except NotApplicable as exc:
        raise PremiseFailure("admissible_coefficient_signs", str(exc)) from exc
    established = admissible == frozenset({"C"})
    a0_signs = LEMMA2_TRIPLES["C"] if established else (a_t0, None, None)
    premises.append(
        Premise(
            "input_coefficient_signs",
            established,
            f"(a_T0', a_K0', a_L0') = ({', '.join(sign_char(s) for s in a0_signs)}); admissible triples {sorted(admissible)}",
        )
    )

    # 5. segment, quadrant and refinement
    segment_info = None
    quadrant_iv = None
    if established:
        seg = segment_estimate(dc, income, a0_signs)
        quadrant_iv = seg.quadrant_iv
        segment_info = {
            "point_A_signs": [sign_char(s) for s in seg.a_signs],
            "point_B_signs": [sign_char(s) for s in seg.b_signs],
            "point_A": None,
            "point_B": None,
            "quadrant_iv": seg.quadrant_iv,
        }
        premises.append(Premise("quadrant_iv", seg.quadrant_iv, "both segment endpoints have S' > 0 and U' < 0"))
        refinement = corollary_refine(dc, dist, a0_signs)
        subregions = refinement.subregions if seg.quadrant_iv else ALL_SUBREGIONS
        checks = dict(refinement.checks)
        notes.append(refinement.note)
    else:
        subregions = ALL_SUBREGIONS
        checks = {"wage_vs_importable": bool(dc.z_plus_p > 0), "wage_vs_exportable": bool(dc.z < 0), "b_inside_strip": None}
        premises.append(Premise("quadrant_iv", None, "not established"))
        notes.append(
            "the aggregate land coefficient sign is not determined, so the admissible triples "
            f"{sorted(admissible)} do not single out (+, +, -); quadrant IV is not established and the "
            "sign matrix below is conditional on it"
        )

    pattern = theorem1_pattern(subregions)
    cell_source = []
    for j in range(2):
        row = []
        for i in range(3):
            if i in (T, K):
                src = "strong Rybczynski result" if quadrant_iv else "conditional on quadrant IV"
            elif pattern[j][i] is None:
                src = "undetermined across " + ", ".join(s.value for s in sorted(subregions))
            else:
                src = "common to " + ", ".join(s.value for s in sorted(subregions))
            row.append(src)
        cell_source.append(row)
    rel = relative_effects_for(subregions)
    by_sub = {}
    for s in sorted(ALL_SUBREGIONS):
        labor = relative_output_signs(PATTERNS[s])[L]
        by_sub[s.value] = {"labor_relative_effect": _effect_word(labor), "admissible": s in subregions}
    excluded = tuple(s.value for s in sorted(ALL_SUBREGIONS - subregions))

    labor_rel = rel[FACTORS[L]]
    if labor_rel is None:
        share_text = (
            "labor growth has an indeterminate effect on rice output relative to textile output, "
            "so at constant prices its effect on the exportable sector's share of national income is indeterminate"
        )
    else:
        word = "raises" if labor_rel > 0 else "lowers"
        share_text = f"labor growth {word} rice output relative to textile output and {word} the exportable sector's income share"

    migration = [migration_analysis(dataset.migration, p).to_dict() for p in config.migration_periods]

    return Verdict(
        period=(start, end),
        factor_prices=fp_dict,
        lambdas={**lam.to_dict(), "lambda_K1": float(alloc.lam[K, 0])},
        shares={
            "theta_sector1": list(theta1),
            "theta_sector2": list(theta2),
            "theta_sector2_source": theta2_source,
            "goods_share": list(goods),
            "factor_income_share": [float(v) for v in income.factors],
        },
        premises=tuple(premises),
        yield_trends={"a_T1": info1, "a_T2": info2, "a_T0_prime": sign_char(a_t0)},
        a0_signs=tuple(a0_signs),
        admissible_triples=tuple(sorted(admissible)),
        segment=segment_info,
        quadrant_iv=quadrant_iv,
        refinement_checks=checks,
        subregions=tuple(s.value for s in sorted(subregions)),
        excluded_subregions=excluded,
        sign_matrix=pattern,
        sign_provenance=cell_source,
        relative_effects=rel,
        relative_effects_by_subregion=by_sub,
        share_implication=share_text,
        migration=migration,
        provenance=dataset.provenance(),
        notes=tuple(notes),
    )


def format_verdict(v: Verdict) -> str:
    fp = v.factor_prices
    prov = v.provenance
    lines = [f"Case study {v.period[0]}-{v.period[1]}", ""]
    lines.append("Deflated factor prices")
    for k, label in (("P", "terms of trade (kg shirting per picul of rice)"), ("X", "land price in rice"), ("Z", "wage in rice")):
        c = fp[k]
        lines.append(f"  {k} = {c['percent']:+.1f}%  [{c['provenance']}]  {label}, {c['start']} to {c['end']}")
    lines.append(f"  Z + P = {fp['Z_plus_P']:+.1f}%  [computed]  wage in the importable, first order")
    lines.append("")
    lm = v.lambdas
    lines.append("Allocation shares")
    lines.append(f"  lambda_T1 = {lm['lambda_T1']:.4f}  [{prov['crops']}]  exportable crop area / total crop area")
    lines.append(f"  lambda_L1 = {lm['lambda_L1']:.4f}  [{prov['labor']}]  agricultural labor / total labor")
    lines.append(f"  lambda_K1 = {lm['lambda_K1']:.4f}  [computed]  implied by the share scenario")
    sh = v.shares
    lines.append(f"  theta_1 = ({', '.join(f'{x:.4f}' for x in sh['theta_sector1'])})  [assumed]  sector-1 cost shares T, K, L")
    lines.append(f"  theta_2 = ({', '.join(f'{x:.4f}' for x in sh['theta_sector2'])})  [{sh['theta_sector2_source']}]")
    lines.append("")
    lines.append("Premises")
    for p in v.premises:
        mark = {True: "pass", False: "FAIL", None: "open"}[p.passed]
        lines.append(f"  [{mark}] {p.name}: {p.detail}")
    lines.append("")
    yt = v.yield_trends
    for key in ("a_T1", "a_T2"):
        info = yt[key]
        if info["source"] == "override":
            lines.append(f"  {info['coefficient']} = {info['sign']}  [override]")
        else:
            lines.append(
                f"  {info['coefficient']} = {info['sign']}  [{prov[info['crop'] + '_production']}]  "
                f"3-year average yield {info['start_value']:.1f} -> {info['end_value']:.1f} kg/rai"
            )
    lines.append(f"  a_T0' = {yt['a_T0_prime']}  [computed]")
    lines.append(f"  admissible sign triples: {', '.join(v.admissible_triples)}")
    if v.segment:
        lines.append(f"  point A signs (S', U') = ({', '.join(v.segment['point_A_signs'])}); point B signs = ({', '.join(v.segment['point_B_signs'])})")
    lines.append("")
    lines.append(f"Subregions: {{{', '.join(v.subregions)}}}" + (f"; excluded: {', '.join(v.excluded_subregions)}" if v.excluded_subregions else ""))
    lines.append("Rybczynski sign matrix (rows X1, X2; columns V_T, V_K, V_L)")
    for j in range(2):
        lines.append("  [" + " ".join(f"{sign_char(s):>2}" for s in v.sign_matrix[j]) + " ]")
    lines.append("Relative output effects X1*/V_i* - X2*/V_i*")
    for f in FACTORS:
        lines.append(f"  {f}: {_effect_word(v.relative_effects[f])}")
    lines.append(f"Share implication: {v.share_implication}")
    lines.append("")
    lines.append("Chinese net arrivals against population growth")
    for m in v.migration:
        lines.append(
            f"  {m['start']} to {m['end']}: net {m['net']:.1f} thousand over growth {m['growth']:.0f} thousand "
            f"({m['population_start_year']}-{m['population_end_year']}) = {m['ratio_percent']:.1f}%  [{prov['migration']}]"
        )
    for n in v.notes:
        lines.append(f"Note: {n}")
    return "\n".join(lines)


__all__ = [
    "CaseStudyConfig",
    "Premise",
    "Verdict",
    "calibrate_sector2",
    "config_from_text",
    "format_verdict",
    "load_config",
    "parse_period",
    "run_case_study",
]
