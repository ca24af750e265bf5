"""Historical series for the Thailand case study.

Every data file is delimiter-separated text with ``# key: value`` header
lines followed by a column header row.  Three header keys are mandatory::

    # name: rice price
    # unit: baht/picul
    # provenance: published | reconstructed | mixed

``mixed`` files carry a per-row ``provenance`` column instead.  Files without
a recognised provenance tag are refused.
"""

from __future__ import annotations

import csv
import math
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import DataError

PICUL_KG = 60.48
RAI_PER_HECTARE = 6.25
PROVENANCE_TAGS = ("published", "reconstructed")
DATA_ENV = "THREEFACTOR_DATA"

# Offsets that order sub-annual labels within a calendar year.  A fiscal
# year runs April to March, so it starts a quarter into its first year.
_FISCAL_OFFSET = 0.25
_PARTIAL_OFFSET = {"1/4": 0.0, "3/4": 0.25}

_CALENDAR_RE = re.compile(r"^(\d{4})$")
_FISCAL_RE = re.compile(r"^(\d{4})\s*-\s*(\d{2}|\d{4})$")
_PARTIAL_RE = re.compile(r"^(\d{4})\s*\(\s*(1/4|3/4)\s*yr\.?\s*\)$")


# --------------------------------------------------------------------------
# Year labels
# --------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class YearLabel:
    """A calendar year, a fiscal span such as ``1920-21``, or a partial year."""

    key: float
    text: str = field(compare=False)
    year: int = field(compare=False)
    kind: str = field(compare=False)

    @classmethod
    def parse(cls, raw: str | int) -> YearLabel:
        s = str(raw).strip()
        m = _CALENDAR_RE.match(s)
        if m:
            y = int(m.group(1))
            return cls(float(y), s, y, "calendar")
        m = _FISCAL_RE.match(s)
        if m:
            y = int(m.group(1))
            tail = m.group(2)
            end = int(tail) if len(tail) == 4 else (y // 100) * 100 + int(tail)
            if end < y:
                end += 100
            if end != y + 1:
                raise DataError(f"fiscal label {s!r} must span consecutive years")
            return cls(y + _FISCAL_OFFSET, f"{y}-{str(y + 1)[2:]}", y, "fiscal")
        m = _PARTIAL_RE.match(s)
        if m:
            y = int(m.group(1))
            frac = m.group(2)
            return cls(y + _PARTIAL_OFFSET[frac], f"{y} ({frac}yr.)", y, "partial")
        raise DataError(f"unrecognised year label {s!r}")

    def __str__(self) -> str:
        return self.text


def _as_label(label: str | int | YearLabel) -> YearLabel:
    return label if isinstance(label, YearLabel) else YearLabel.parse(label)


def _resolve(labels: Sequence[YearLabel], label: str | int | YearLabel, what: str) -> int:
    """Index of ``label`` in ``labels``.

    Exact matches win.  Otherwise a calendar year joins with the fiscal year
    starting in it (and vice versa), provided the match is unique.
    """
    target = _as_label(label)
    for k, lab in enumerate(labels):
        if lab.key == target.key and lab.kind == target.kind:
            return k
    if target.kind != "partial":
        hits = [k for k, lab in enumerate(labels) if lab.year == target.year and lab.kind != "partial"]
        if len(hits) == 1:
            return hits[0]
    raise DataError(f"label {target.text!r} not resolvable in {what}")


# --------------------------------------------------------------------------
# Document reading
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _Document:
    meta: dict[str, str]
    columns: list[str]
    rows: list[list[str]]
    path: str


def _read_document(path: str | os.PathLike) -> _Document:
    p = Path(path)
    if not p.is_file():
        raise DataError(f"data file not found: {p}")
    text = p.read_text(encoding="utf-8")
    meta: dict[str, str] = {}
    body: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            key, sep, value = stripped[1:].partition(":")
            if sep:
                meta[key.strip().lower()] = value.strip()
            continue
        body.append(stripped)
    if not body:
        raise DataError(f"{p.name}: no records")
    for key in ("name", "unit", "provenance"):
        if key not in meta:
            raise DataError(f"{p.name}: missing '# {key}:' header")
    dialect = "excel-tab" if "\t" in body[0] else "excel"
    records = [[c.strip() for c in row] for row in csv.reader(body, dialect=dialect)]
    columns = [c.lower() for c in records[0]]
    rows = records[1:]
    if not rows:
        raise DataError(f"{p.name}: no data rows")
    for n, row in enumerate(rows, start=1):
        if len(row) != len(columns):
            raise DataError(f"{p.name}: row {n} has {len(row)} fields, expected {len(columns)}")
    return _Document(meta, columns, rows, str(p))


def _row_provenance(doc: _Document) -> list[str]:
    tag = doc.meta["provenance"].lower()
    name = Path(doc.path).name
    if "provenance" in doc.columns:
        k = doc.columns.index("provenance")
        tags = [row[k].lower() for row in doc.rows]
    elif tag == "mixed":
        raise DataError(f"{name}: 'mixed' provenance needs a per-row provenance column")
    else:
        tags = [tag] * len(doc.rows)
    for t in tags:
        if t not in PROVENANCE_TAGS:
            raise DataError(f"{name}: provenance tag {t!r} is not one of {PROVENANCE_TAGS}")
    return tags


def _number(raw: str, where: str) -> float:
    try:
        v = float(raw.replace(",", ""))
    except ValueError:
        raise DataError(f"{where}: {raw!r} is not a number") from None
    if not math.isfinite(v):
        raise DataError(f"{where}: non-finite value")
    return v


def _labels(doc: _Document) -> list[YearLabel]:
    if "year_label" not in doc.columns:
        raise DataError(f"{Path(doc.path).name}: missing year_label column")
    k = doc.columns.index("year_label")
    labels = [YearLabel.parse(row[k]) for row in doc.rows]
    for prev, cur in zip(labels, labels[1:]):
        if cur.key == prev.key:
            raise DataError(f"{Path(doc.path).name}: duplicate year {cur.text!r}")
        if cur.key < prev.key:
            raise DataError(f"{Path(doc.path).name}: years not increasing at {cur.text!r}")
    return labels


# --------------------------------------------------------------------------
# Series
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesSchema:
    unit: str | None = None
    name: str | None = None


@dataclass(frozen=True)
class SeriesTable:
    name: str
    unit: str
    labels: tuple[YearLabel, ...]
    values: np.ndarray
    provenance: tuple[str, ...]

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        if len(vals) != len(self.labels) or len(self.provenance) != len(self.labels):
            raise DataError(f"{self.name}: labels, values and provenance differ in length")
        if not np.all(np.isfinite(vals)):
            raise DataError(f"{self.name}: non-finite value")
        keys = [lab.key for lab in self.labels]
        if any(b <= a for a, b in zip(keys, keys[1:])):
            raise DataError(f"{self.name}: year labels must be strictly increasing")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str | int | YearLabel) -> int:
        return _resolve(self.labels, label, f"series {self.name!r}")

    def value(self, label: str | int | YearLabel) -> float:
        return float(self.values[self.index(label)])

    def label(self, label: str | int | YearLabel) -> YearLabel:
        return self.labels[self.index(label)]

    def items(self) -> list[tuple[str, float]]:
        return [(lab.text, float(v)) for lab, v in zip(self.labels, self.values)]

    def tag(self) -> str:
        tags = set(self.provenance)
        return tags.pop() if len(tags) == 1 else "mixed"


def load_series(path: str | os.PathLike, schema: SeriesSchema | str | None = None) -> SeriesTable:
    """Load a two-column (year_label, value) series, optionally with provenance."""
    if isinstance(schema, str):
        schema = SeriesSchema(unit=schema)
    doc = _read_document(path)
    name = Path(path).name
    if "value" not in doc.columns:
        raise DataError(f"{name}: missing value column")
    extra = set(doc.columns) - {"year_label", "value", "provenance"}
    if extra:
        raise DataError(f"{name}: unexpected columns {sorted(extra)}")
    unit = doc.meta["unit"]
    if schema is not None:
        if schema.unit is not None and schema.unit != unit:
            raise DataError(f"{name}: unit {unit!r} does not match expected {schema.unit!r}")
        if schema.name is not None and schema.name != doc.meta["name"]:
            raise DataError(f"{name}: series {doc.meta['name']!r} is not {schema.name!r}")
    labels = _labels(doc)
    k = doc.columns.index("value")
    values = [_number(row[k], f"{name} row {n}") for n, row in enumerate(doc.rows, start=1)]
    return SeriesTable(doc.meta["name"], unit, tuple(labels), np.array(values), tuple(_row_provenance(doc)))


def _combine_tags(*tags: str) -> str:
    return "published" if all(t == "published" for t in tags) else "reconstructed"


def ratio_series(num: SeriesTable, den: SeriesTable, name: str, unit: str, scale: float = 1.0) -> SeriesTable:
    """scale * num / den on the labels common to both tables."""
    labels, values, prov = [], [], []
    for k, lab in enumerate(num.labels):
        try:
            j = den.index(lab)
        except DataError:
            continue
        if den.values[j] == 0:
            raise DataError(f"{den.name}: zero value at {lab.text}")
        labels.append(lab)
        values.append(scale * num.values[k] / den.values[j])
        prov.append(_combine_tags(num.provenance[k], den.provenance[j]))
    if not labels:
        raise DataError(f"{num.name} and {den.name} share no years")
    return SeriesTable(name, unit, tuple(labels), np.array(values), tuple(prov))


def hectares_to_rai(table: SeriesTable) -> SeriesTable:
    if table.unit != "hectare":
        raise DataError(f"{table.name}: expected unit 'hectare', found {table.unit!r}")
    return SeriesTable(table.name, "rai", table.labels, table.values * RAI_PER_HECTARE, table.provenance)


def rai_to_hectares(table: SeriesTable) -> SeriesTable:
    if table.unit != "rai":
        raise DataError(f"{table.name}: expected unit 'rai', found {table.unit!r}")
    return SeriesTable(table.name, "hectare", table.labels, table.values / RAI_PER_HECTARE, table.provenance)


# --------------------------------------------------------------------------
# Period changes and deflated factor prices
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodChange:
    quantity: str
    start: str
    end: str
    start_value: float
    end_value: float
    percent: float
    formula: str
    provenance: str

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "start": self.start,
            "end": self.end,
            "start_value": self.start_value,
            "end_value": self.end_value,
            "percent": self.percent,
            "formula": self.formula,
            "provenance": self.provenance,
        }


def period_change(table: SeriesTable, start, end, quantity: str | None = None, formula: str = "") -> PeriodChange:
    i, j = table.index(start), table.index(end)
    a, b = float(table.values[i]), float(table.values[j])
    if a == 0:
        raise DataError(f"{table.name}: zero level at {table.labels[i].text}")
    return PeriodChange(
        quantity or table.name,
        table.labels[i].text,
        table.labels[j].text,
        a,
        b,
        100.0 * (b / a - 1.0),
        formula or f"100 * ({table.name}[end] / {table.name}[start] - 1)",
        _combine_tags(table.provenance[i], table.provenance[j]),
    )


def _require_unit(table: SeriesTable, allowed: Sequence[str]) -> None:
    if table.unit not in allowed:
        raise DataError(f"{table.name}: unit {table.unit!r} not in {list(allowed)}")


def shirting_per_kg(shirting_price: SeriesTable) -> SeriesTable:
    _require_unit(shirting_price, ("baht/picul", "baht/kg"))
    if shirting_price.unit == "baht/kg":
        return shirting_price
    return SeriesTable(
        shirting_price.name, "baht/kg", shirting_price.labels, shirting_price.values / PICUL_KG, shirting_price.provenance
    )


def deflated_series(wage: SeriesTable, rice_price: SeriesTable, land_price: SeriesTable, shirting_price: SeriesTable) -> dict[str, SeriesTable]:
    """Wage and land price in rice, and kilograms of shirting per picul of rice."""
    _require_unit(rice_price, ("baht/picul",))
    _require_unit(wage, ("baht/day",))
    _require_unit(land_price, ("baht/rai",))
    return {
        "wage_in_rice": ratio_series(wage, rice_price, "wage in rice", "kg/day", scale=PICUL_KG),
        "land_in_rice": ratio_series(land_price, rice_price, "land price in rice", "picul/rai"),
        "terms_of_trade": ratio_series(rice_price, shirting_per_kg(shirting_price), "terms of trade", "kg shirting/picul rice"),
    }


@dataclass(frozen=True)
class FactorPriceChanges:
    P: PeriodChange
    X: PeriodChange
    Z: PeriodChange

    @property
    def z_plus_p(self) -> float:
        """First-order change in the wage measured in the importable."""
        return self.Z.percent + self.P.percent

    def to_dict(self) -> dict:
        return {"P": self.P.to_dict(), "X": self.X.to_dict(), "Z": self.Z.to_dict(), "Z_plus_P": self.z_plus_p}


def compute_factor_price_changes(
    wage: SeriesTable,
    rice_price: SeriesTable,
    land_price: SeriesTable,
    shirting_price: SeriesTable,
    period: tuple = (1920, 1927),
) -> FactorPriceChanges:
    """Percent changes of the deflated factor prices and the terms of trade.

    Every change is computed on the deflated levels, never by differencing
    component growth rates.
    """
    start, end = period
    for t in (wage, rice_price, land_price, shirting_price):
        t.index(start), t.index(end)
    d = deflated_series(wage, rice_price, land_price, shirting_price)
    return FactorPriceChanges(
        P=period_change(d["terms_of_trade"], start, end, "P", "100 * (tot[end] / tot[start] - 1), tot = rice price per picul / shirting price per kg"),
        X=period_change(d["land_in_rice"], start, end, "X", "100 * (r[end] / r[start] - 1), r = land price / rice price"),
        Z=period_change(d["wage_in_rice"], start, end, "Z", "100 * (r[end] / r[start] - 1), r = wage / rice price"),
    )


# --------------------------------------------------------------------------
# Yields
# --------------------------------------------------------------------------


def yield_series(production: SeriesTable, area: SeriesTable, crop: str = "") -> SeriesTable:
    """Average yield in kg per rai."""
    _require_unit(production, ("picul", "kg"))
    if area.unit != "rai":
        raise DataError(f"{area.name}: area must be in rai (found {area.unit!r}); convert explicitly")
    scale = PICUL_KG if production.unit == "picul" else 1.0
    return ratio_series(production, area, f"{crop or production.name} yield", "kg/rai", scale=scale)


def moving_average(table: SeriesTable, window: int = 3) -> SeriesTable:
    """Centered moving average over consecutive calendar years.

    Points whose window crosses a gap or the series edge are dropped.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be a positive odd integer")
    half = window // 2
    years = [lab.year for lab in table.labels]
    labels, values, prov = [], [], []
    for k in range(half, len(table) - half):
        span = years[k - half : k + half + 1]
        if span != list(range(years[k] - half, years[k] + half + 1)):
            continue
        labels.append(table.labels[k])
        values.append(float(np.mean(table.values[k - half : k + half + 1])))
        prov.append(_combine_tags(*table.provenance[k - half : k + half + 1]))
    if not labels:
        raise DataError(f"{table.name}: too few consecutive years for a {window}-year moving average")
    return SeriesTable(f"{table.name} ({window}-year moving average)", table.unit, tuple(labels), np.array(values), tuple(prov))


@dataclass(frozen=True)
class YieldTrend:
    crop: str
    start: str
    end: str
    start_value: float
    end_value: float
    trend: int
    coefficient_sign: int
    method: str

    @property
    def indeterminate(self) -> bool:
        return self.trend == 0

    def to_dict(self) -> dict:
        return {
            "crop": self.crop,
            "start": self.start,
            "end": self.end,
            "start_value": self.start_value,
            "end_value": self.end_value,
            "trend": self.trend,
            "coefficient_sign": self.coefficient_sign,
            "method": self.method,
            "indeterminate": self.indeterminate,
        }


def yield_trend_sign(
    production: SeriesTable,
    area: SeriesTable,
    crop: str,
    period: tuple,
    method: str = "ma3",
    tol: float = 1e-9,
) -> YieldTrend:
    """Trend of the average yield and the implied sign of the land coefficient.

    The land input per unit of output moves against the yield, so the
    coefficient sign is minus the trend sign.  ``method`` is ``"ma3"``
    (centered three-year moving average) or ``"endpoint"`` (raw levels).
    """
    y = yield_series(production, area, crop)
    if method == "ma3":
        for lab in period:
            k = y.index(lab)
            if k == 0 or k == len(y) - 1 or y.labels[k - 1].year != y.labels[k].year - 1 or y.labels[k + 1].year != y.labels[k].year + 1:
                raise DataError(f"{crop}: insufficient data for a 3-year moving average at {y.labels[k].text}")
        src = moving_average(y, 3)
    elif method == "endpoint":
        src = y
    else:
        raise ValueError(f"unknown trend method {method!r}")
    a, b = src.value(period[0]), src.value(period[1])
    diff = b - a
    trend = 0 if abs(diff) <= tol * max(abs(a), abs(b), 1.0) else (1 if diff > 0 else -1)
    return YieldTrend(crop, src.label(period[0]).text, src.label(period[1]).text, a, b, trend, -trend, method)


# --------------------------------------------------------------------------
# Allocation-share estimates
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CropTable:
    items: tuple[str, ...]
    areas: np.ndarray
    classes: tuple[str | None, ...]
    provenance: str


@dataclass(frozen=True)
class LaborCounts:
    agriculture: float
    total: float
    provenance: str


def load_crop_table(path: str | os.PathLike) -> CropTable:
    doc = _read_document(path)
    name = Path(path).name
    for col in ("item", "area"):
        if col not in doc.columns:
            raise DataError(f"{name}: missing {col} column")
    if doc.meta["unit"] != "rai":
        raise DataError(f"{name}: crop areas must be in rai")
    tags = set(_row_provenance(doc))
    ki, ka = doc.columns.index("item"), doc.columns.index("area")
    kc = doc.columns.index("class") if "class" in doc.columns else None
    items = tuple(row[ki] for row in doc.rows)
    if len(set(items)) != len(items):
        raise DataError(f"{name}: duplicate crop")
    areas = np.array([_number(row[ka], f"{name} {row[ki]}") for row in doc.rows])
    classes = tuple((row[kc].upper() or None) if kc is not None else None for row in doc.rows)
    return CropTable(items, areas, classes, tags.pop() if len(tags) == 1 else "mixed")


def load_labor(path: str | os.PathLike) -> LaborCounts:
    doc = _read_document(path)
    name = Path(path).name
    if doc.columns[:2] != ["category", "persons"]:
        raise DataError(f"{name}: expected columns category, persons")
    counts = {row[0].lower(): _number(row[1], name) for row in doc.rows}
    if "agriculture" not in counts or "total" not in counts:
        raise DataError(f"{name}: needs agriculture and total rows")
    tags = set(_row_provenance(doc))
    return LaborCounts(counts["agriculture"], counts["total"], tags.pop() if len(tags) == 1 else "mixed")


@dataclass(frozen=True)
class LambdaEstimates:
    lambda_T1: float
    lambda_L1: float
    exportable_area: float
    total_area: float
    agricultural_labor: float
    total_labor: float
    provenance: str

    def to_dict(self) -> dict:
        return {
            "lambda_T1": self.lambda_T1,
            "lambda_L1": self.lambda_L1,
            "exportable_area": self.exportable_area,
            "total_area": self.total_area,
            "agricultural_labor": self.agricultural_labor,
            "total_labor": self.total_labor,
            "provenance": self.provenance,
        }


def lambda_estimates(
    crops: CropTable,
    classification: Mapping[str, str] | None = None,
    labor: LaborCounts | None = None,
) -> LambdaEstimates:
    """Land and labor shares of the exportable sector.

    ``classification`` maps crop names to ``"E"`` or ``"I"`` and overrides
    the table's own class column.
    """
    labels = []
    for item, cls in zip(crops.items, crops.classes):
        label = classification.get(item, cls) if classification is not None else cls
        if label is None:
            raise DataError(f"crop {item!r} is not classified")
        label = label.upper()
        if label not in ("E", "I"):
            raise DataError(f"crop {item!r}: class must be E or I, found {label!r}")
        labels.append(label)
    total = float(crops.areas.sum())
    exportable = float(sum(a for a, lab in zip(crops.areas, labels) if lab == "E"))
    if total <= 0:
        raise DataError("total crop area must be positive")
    if labor is None:
        lam_l = float("nan")
        agri = tot = float("nan")
        prov = crops.provenance
    else:
        if labor.total <= 0 or not 0 <= labor.agriculture <= labor.total:
            raise DataError("labor counts must satisfy 0 <= agriculture <= total")
        agri, tot = labor.agriculture, labor.total
        lam_l = agri / tot
        prov = _combine_tags(crops.provenance, labor.provenance)
    return LambdaEstimates(exportable / total, lam_l, exportable, total, agri, tot, prov)


# --------------------------------------------------------------------------
# Migration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MigrationTable:
    name: str
    unit: str
    labels: tuple[YearLabel, ...]
    arrivals: np.ndarray
    departures: np.ndarray
    net: np.ndarray
    provenance: str

    @property
    def tolerance(self) -> float:
        return 0.1 if self.unit.startswith("thousand") else 1.0

    def index(self, label) -> int:
        return _resolve(self.labels, label, f"migration table {self.name!r}")

    def window(self, start=None, end=None) -> slice:
        i = 0 if start is None else self.index(start)
        j = len(self.labels) - 1 if end is None else self.index(end)
        if j < i:
            raise DataError(f"{self.name}: period end precedes start")
        return slice(i, j + 1)

    def totals(self, start=None, end=None) -> tuple[float, float, float]:
        s = self.window(start, end)
        return float(self.arrivals[s].sum()), float(self.departures[s].sum()), float(self.net[s].sum())

    def in_thousands(self) -> float:
        return 1.0 if self.unit.startswith("thousand") else 1e-3


def load_migration(path: str | os.PathLike) -> MigrationTable:
    doc = _read_document(path)
    name = Path(path).name
    for col in ("arrivals", "departures", "net"):
        if col not in doc.columns:
            raise DataError(f"{name}: missing {col} column")
    unit = doc.meta["unit"]
    if unit not in ("persons", "thousands of persons"):
        raise DataError(f"{name}: unit must be persons or thousands of persons")
    labels = _labels(doc)
    cols = {c: np.array([_number(row[doc.columns.index(c)], f"{name} row {n}") for n, row in enumerate(doc.rows, 1)]) for c in ("arrivals", "departures", "net")}
    tags = set(_row_provenance(doc))
    table = MigrationTable(doc.meta["name"], unit, tuple(labels), cols["arrivals"], cols["departures"], cols["net"], tags.pop() if len(tags) == 1 else "mixed")
    gap = np.abs(table.arrivals - table.departures - table.net)
    bad = np.flatnonzero(gap > table.tolerance + 1e-9)
    if bad.size:
        raise DataError(f"{name}: net differs from arrivals - departures at {labels[bad[0]].text}")
    return table


@dataclass(frozen=True)
class PeriodTotal:
    start: str
    end: str
    net: float


def load_period_totals(path: str | os.PathLike) -> tuple[PeriodTotal, ...]:
    doc = _read_document(path)
    name = Path(path).name
    if doc.columns[:3] != ["start_label", "end_label", "net"]:
        raise DataError(f"{name}: expected columns start_label, end_label, net")
    _row_provenance(doc)
    return tuple(PeriodTotal(YearLabel.parse(r[0]).text, YearLabel.parse(r[1]).text, _number(r[2], name)) for r in doc.rows)


@dataclass(frozen=True)
class MigrationTables:
    skinner_annual: MigrationTable
    yearbook: MigrationTable
    skinner_long: MigrationTable
    printed_totals: tuple[PeriodTotal, ...]
    population: Mapping[str, SeriesTable]

    def source(self, name: str) -> MigrationTable:
        try:
            return {"skinner_annual": self.skinner_annual, "yearbook": self.yearbook, "skinner_long": self.skinner_long}[name]
        except KeyError:
            raise DataError(f"unknown migration source {name!r}") from None


@dataclass(frozen=True)
class MigrationSummary:
    source: str
    population_source: str
    start: str
    end: str
    arrivals: float
    departures: float
    net: float
    population_start_year: str
    population_end_year: str
    population_start: float
    population_end: float
    growth: float
    ratio_percent: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def migration_analysis(
    tables: MigrationTables,
    period: tuple,
    population_period: tuple | None = None,
    source: str = "skinner_long",
    population: str = "kobayashi",
) -> MigrationSummary:
    """Net arrivals over ``period`` as a percentage of population growth.

    Migration totals are in thousands of persons.  Unless given, the
    population window runs from the starting year of the first migration
    label to the year after the start of the last one.
    """
    table = tables.source(source)
    if population not in tables.population:
        raise DataError(f"unknown population source {population!r}")
    pop = tables.population[population]
    s = table.window(*period)
    first, last = table.labels[s.start], table.labels[s.stop - 1]
    if population_period is None:
        end_year = last.year + 1 if last.kind != "calendar" else last.year
        population_period = (first.year, end_year)
    p0, p1 = pop.value(population_period[0]), pop.value(population_period[1])
    growth = p1 - p0
    if growth == 0:
        raise DataError("population growth over the period is zero")
    scale = table.in_thousands()
    arr, dep, net = (scale * v for v in table.totals(*period))
    return MigrationSummary(
        source,
        population,
        first.text,
        last.text,
        arr,
        dep,
        net,
        pop.label(population_period[0]).text,
        pop.label(population_period[1]).text,
        p0,
        p1,
        growth,
        100.0 * net / growth,
    )


@dataclass(frozen=True)
class SourceComparison:
    skinner: tuple[float, float, float]
    yearbook: tuple[float, float, float]
    difference: float

    def to_dict(self) -> dict:
        return {"skinner": list(self.skinner), "yearbook": list(self.yearbook), "difference_in_net": self.difference}


def compare_sources(tables: MigrationTables, start=None, end=None) -> SourceComparison:
    """Totals of both annual sources (persons) and the gap in net arrivals."""
    sk = tables.skinner_annual.totals(start, end)
    yb = tables.yearbook.totals(start, end)
    return SourceComparison(sk, yb, sk[2] - yb[2])


def check_period_totals(tables: MigrationTables) -> list[tuple[PeriodTotal, float, bool]]:
    out = []
    for pt in tables.printed_totals:
        computed = tables.skinner_long.totals(pt.start, pt.end)[2]
        out.append((pt, computed, abs(computed - pt.net) <= 0.1 + 1e-9))
    return out


# --------------------------------------------------------------------------
# Bundled dataset
# --------------------------------------------------------------------------

SERIES_FILES = {
    "wage": ("wage.csv", "baht/day"),
    "rice_price": ("rice_price.csv", "baht/picul"),
    "land_price": ("land_price.csv", "baht/rai"),
    "shirting_price": ("shirting_price.csv", None),
    "rice_production": ("rice_production.csv", None),
    "rice_area": ("rice_area.csv", "rai"),
    "cotton_production": ("cotton_production.csv", None),
    "cotton_area": ("cotton_area.csv", "rai"),
}
POPULATION_FILES = {"kobayashi": "population_kobayashi.csv", "bourgeois_pichat": "population_bourgeois_pichat.csv"}


def default_data_dir() -> Path:
    env = os.environ.get(DATA_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("threefactor") / "data"))


@dataclass(frozen=True)
class Dataset:
    root: Path
    series: Mapping[str, SeriesTable]
    crops: CropTable
    labor: LaborCounts
    migration: MigrationTables

    def __getitem__(self, key: str) -> SeriesTable:
        return self.series[key]

    def provenance(self) -> dict[str, str]:
        out = {k: t.tag() for k, t in self.series.items()}
        out["crops"] = self.crops.provenance
        out["labor"] = self.labor.provenance
        out["migration"] = _combine_tags(self.migration.skinner_annual.provenance, self.migration.yearbook.provenance, self.migration.skinner_long.provenance)
        for k, t in self.migration.population.items():
            out[f"population_{k}"] = t.tag()
        return out


def load_dataset(root: str | os.PathLike | None = None) -> Dataset:
    base = Path(root) if root is not None else default_data_dir()
    if not base.is_dir():
        raise DataError(f"dataset directory not found: {base}")
    series = {k: load_series(base / fn, unit) for k, (fn, unit) in SERIES_FILES.items()}
    migration = MigrationTables(
        load_migration(base / "migration_skinner_annual.csv"),
        load_migration(base / "migration_yearbook.csv"),
        load_migration(base / "migration_skinner_long.csv"),
        load_period_totals(base / "migration_skinner_periods.csv"),
        {k: load_series(base / fn, "thousands of persons") for k, fn in POPULATION_FILES.items()},
    )
    return Dataset(base, series, load_crop_table(base / "crop_area.csv"), load_labor(base / "labor_force.csv"), migration)
