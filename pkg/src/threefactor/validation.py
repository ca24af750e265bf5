"""Property checks of the classification results against sampled economies.

Each sampled economy is a generalized-Leontief economy solved exactly, so
the linearized model, the Rybczynski classification and the price-based
refinements can all be compared with ground truth.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .classify import (
    LEMMA2_TRIPLES,
    PATTERNS,
    Subregion,
    corollary_refine,
    deflated_changes,
    segment_estimate,
    strip_subregion,
    subregion_of,
)
from .core import SIGN_TOL, ews
from .errors import Boundary, ModelError
from .hat import ShockVector, reciprocity_check, rybczynski_matrix, solve_changes
from .oracle import Constraints, Sample, fd_response, sample_many

ROW_SUM_TOL = 1e-8
RECIPROCITY_TOL = 1e-8
ORACLE_REL_TOL = 1e-4
RESIDUAL_TOL = 1e-10
COLLINEARITY_TOL = 1e-6
SHOCK_SIZE = 0.01

_TRIPLE_LETTER = {v: k for k, v in LEMMA2_TRIPLES.items()}


@dataclass
class FamilyResult:
    name: str
    checked: int = 0
    failures: int = 0
    max_residual: float = 0.0
    asserted: bool = True
    examples: list = field(default_factory=list)

    def record(self, ok: bool, residual: float = 0.0, example=None) -> None:
        self.checked += 1
        self.max_residual = max(self.max_residual, float(residual))
        if not ok:
            self.failures += 1
            if example is not None and len(self.examples) < 5:
                self.examples.append(example)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {
            "checked": self.checked,
            "failures": self.failures,
            "max_residual": self.max_residual,
            "asserted": self.asserted,
            "passed": self.passed,
            "examples": self.examples,
        }


@dataclass
class StripReport:
    """Operational subregion against the band of S' set by the intensity ratios."""

    table: dict = field(default_factory=dict)  # (operational, band) -> count
    agree: int = 0
    total: int = 0

    def record(self, operational: Subregion, band: Subregion) -> None:
        key = f"{operational.value}|{band.value}"
        self.table[key] = self.table.get(key, 0) + 1
        self.total += 1
        self.agree += operational == band

    @property
    def agreement_rate(self) -> float:
        return self.agree / self.total if self.total else float("nan")

    def to_dict(self) -> dict:
        return {"counts": dict(sorted(self.table.items())), "agree": self.agree, "total": self.total, "agreement_rate": self.agreement_rate}


@dataclass
class ValidationSummary:
    seed: int
    n: int
    constraints: str
    families: dict
    subregion_counts: dict
    boundary_cases: int
    strip: StripReport
    elapsed: float

    @property
    def passed(self) -> bool:
        return all(f.passed for f in self.families.values() if f.asserted)

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "seed": self.seed,
            "n": self.n,
            "constraints": self.constraints,
            "families": {k: f.to_dict() for k, f in sorted(self.families.items())},
            "subregion_counts": dict(sorted(self.subregion_counts.items())),
            "boundary_cases": self.boundary_cases,
            "strip": self.strip.to_dict(),
            "passed": self.passed,
        }
        if timing:
            out["elapsed_seconds"] = self.elapsed
        return out

    def format(self) -> str:
        lines = [f"validation: seed={self.seed} n={self.n} constraints={self.constraints}"]
        lines.append("subregions: " + ", ".join(f"{k}={v}" for k, v in sorted(self.subregion_counts.items())) + f"; boundary={self.boundary_cases}")
        for name, f in sorted(self.families.items()):
            status = ("PASS" if f.passed else "FAIL") if f.asserted else "info"
            lines.append(f"  [{status}] {name}: {f.checked} checked, {f.failures} failures, max residual {f.max_residual:.3g}")
        s = self.strip
        lines.append(f"  strip band agreement: {s.agree}/{s.total} = {s.agreement_rate:.3f} (reported, not asserted)")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} ({self.elapsed:.1f} s)")
        return "\n".join(lines)


def _random_shock(rng: np.random.Generator) -> ShockVector:
    return ShockVector(rng.normal([0.05, 0.0], 0.05), rng.normal(0.0, 0.1, size=3))


def _check_linear(sample: Sample, families: dict, rng: np.random.Generator, oracle: bool) -> None:
    econ = sample.economy
    r = rybczynski_matrix(econ)
    dev = float(np.abs(r.row_sums() - 1).max())
    families["row_sums"].record(dev <= ROW_SUM_TOL, dev)
    gap = reciprocity_check(econ)
    families["reciprocity"].record(gap <= RECIPROCITY_TOL, gap)

    direction = rng.uniform(-1.0, 1.0, size=5)
    shock = ShockVector(*np.split(SHOCK_SIZE * direction / np.abs(direction).max(), [2]))
    resp = solve_changes(econ, shock)
    res = max(
        float(np.abs(resp.zero_profit_residual(econ)).max()),
        float(np.abs(resp.full_employment_residual(econ)).max()),
        float(np.abs(resp.cost_share_residual(econ)).max()),
    )
    families["residuals"].record(res <= RESIDUAL_TOL, res)
    if oracle:
        hat = np.concatenate([resp.w_hat, resp.x_hat])
        fd = fd_response(sample.gl, shock, step=1e-6, base=sample.snapshot)
        rel = float(np.linalg.norm(hat - fd) / max(np.linalg.norm(fd), SHOCK_SIZE))
        families["oracle_equivalence"].record(rel <= ORACLE_REL_TOL, rel)


def _check_price_shocks(sample: Sample, families: dict, operational: Subregion | None, rng: np.random.Generator, n_shocks: int) -> None:
    econ = sample.economy
    income = econ.income

    # pure terms-of-trade shock: the wage against each good locates point A
    pure = ShockVector.prices(SHOCK_SIZE, 0.0)
    resp = solve_changes(econ, pure)
    dc = deflated_changes(resp.w_hat, pure.p_hat, income)
    if operational is not None:
        a_inside = dc.z < -SIGN_TOL and dc.z_plus_p > SIGN_TOL
        if a_inside:
            families["refinement_soundness"].record(operational == Subregion.P2, example={"subregion": operational.value})
        families["refinement_exactness"].record(a_inside == (operational == Subregion.P2))

    for _ in range(n_shocks):
        shock = _random_shock(rng)
        resp = solve_changes(econ, shock)
        w = resp.w_hat
        P = shock.p_hat[0] - shock.p_hat[1]
        if not (P > SIGN_TOL and w[0] - w[2] > SIGN_TOL and w[2] - w[1] > SIGN_TOL):
            continue
        signs = tuple(0 if abs(v) <= SIGN_TOL else int(np.sign(v)) for v in resp.a0_prime)
        families["lemma2"].record(signs in _TRIPLE_LETTER, example={"triple": signs})
        if signs != LEMMA2_TRIPLES["C"]:
            continue
        dc = deflated_changes(w, shock.p_hat, income)
        seg = segment_estimate(dc, income, resp.a0_prime)
        ratio = ews(econ).ratio
        _, resid = seg.locate(ratio)
        ok = resid <= COLLINEARITY_TOL and seg.chain_holds(ratio) and seg.quadrant_iv and ratio.quadrant == 4
        families["theorem2"].record(ok, resid, example={"ratio": [ratio.s_prime, ratio.u_prime], "A": list(seg.point_a), "B": list(seg.point_b)})
        if operational is not None:
            ref = corollary_refine(dc, econ.distributive, resp.a0_prime)
            families["refinement_mixed_shocks"].record(operational in ref.subregions)


def run_validation(
    seed: int,
    n: int,
    constraints: Constraints = Constraints(quadrant_iv=True),
    shocks_per_economy: int = 20,
    oracle: bool = True,
) -> ValidationSummary:
    """Sample ``n`` economies and check every invariant family on each.

    Asserted families must have zero failures.  The strip-band agreement
    rate and the refinement under mixed shocks are reported only.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    start = time.perf_counter()
    samples = sample_many(seed, n, constraints)
    names = ["row_sums", "reciprocity", "residuals", "lemma2", "theorem2", "refinement_soundness"]
    if oracle:
        names.append("oracle_equivalence")
    families = {k: FamilyResult(k) for k in names}
    families["theorem1"] = FamilyResult("theorem1")
    families["refinement_exactness"] = FamilyResult("refinement_exactness", asserted=False)
    families["refinement_mixed_shocks"] = FamilyResult("refinement_mixed_shocks", asserted=False)
    counts = {s.value: 0 for s in Subregion}
    boundary = 0
    strip = StripReport()
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(n + 1)[-1])

    for sample in samples:
        econ = sample.economy
        _check_linear(sample, families, rng, oracle)
        operational = None
        if ews(econ).ratio.quadrant == 4:
            try:
                operational = subregion_of(econ)
            except Boundary:
                boundary += 1
            except ModelError:
                operational = None
        if operational is not None:
            counts[operational.value] += 1
            signs = rybczynski_matrix(econ).signs()
            pattern = np.array(PATTERNS[operational])
            ok = np.array_equal(signs, pattern) and tuple(signs[:, 0]) == (1, -1) and tuple(signs[:, 1]) == (-1, 1)
            families["theorem1"].record(ok, example={"signs": signs.tolist()})
            strip.record(operational, strip_subregion(econ))
        elif constraints.quadrant_iv:
            families["theorem1"].record(False, example={"reason": "quadrant IV economy not classified"})
        _check_price_shocks(sample, families, operational, rng, shocks_per_economy)

    return ValidationSummary(seed, n, _describe(constraints), families, counts, boundary, strip, time.perf_counter() - start)


def _describe(c: Constraints) -> str:
    parts = []
    if c.quadrant_iv:
        parts.append("quadrant-iv")
    if c.substitutes_only:
        parts.append("substitutes-only")
    if c.middle_case:
        parts.append(f"middle-{c.middle_case}")
    if c.land_share_2 is not None:
        parts.append(f"land-share-2={c.land_share_2:g}")
    return ",".join(parts) or "none"


def parse_constraints(text: str) -> Constraints:
    """Parse a comma-separated list such as ``quadrant-iv,middle-sector1``."""
    kw: dict = {}
    for raw in filter(None, (t.strip() for t in text.split(","))):
        if raw in ("none", ""):
            continue
        if raw == "quadrant-iv":
            kw["quadrant_iv"] = True
        elif raw == "substitutes-only":
            kw["substitutes_only"] = True
        elif raw in ("middle-sector1", "middle-sector2"):
            kw["middle_case"] = raw.split("-")[1]
        elif raw.startswith("land-share-2="):
            kw["land_share_2"] = float(raw.split("=", 1)[1])
        else:
            raise ValueError(f"unknown constraint {raw!r}")
    return Constraints(**kw)
