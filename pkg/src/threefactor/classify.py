"""From observed price changes to admissible Rybczynski sign patterns.

Rates of change are combined additively (``w_L* - p_2* = Z + P``), which is
the first-order convention of the linear model.  Signs are ints in
{+1, -1, 0}; ``None`` marks a sign that is unknown or not determined.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .core import (
    FACTORS,
    SIGN_TOL,
    AllocationShares,
    DistributiveShares,
    Economy,
    Factor,
    IncomeShares,
    IntensityRanking,
    ews,
    intensity_ranking,
    sign,
)
from .errors import (
    Boundary,
    DegenerateIntensity,
    NotApplicable,
    NotStrongRybczynski,
    PointAUndefined,
    PointBUndefined,
)
from .hat import relative_output_signs, rybczynski_matrix

T, K, L = Factor.T, Factor.K, Factor.L

# ---------------------------------------------------------------------------
# deflated changes


@dataclass(frozen=True)
class DeflatedChanges:
    """Factor-price changes measured against the exportable's price.

    ``y`` (capital) may be NaN when the rental rate is not observed.
    """

    p: float  # P = p_1* - p_2*, terms of trade
    x: float  # X = w_T* - p_1*
    y: float  # Y = w_K* - p_1*
    z: float  # Z = w_L* - p_1*
    w_diff: np.ndarray  # W[i, h] = w_i* - w_h*
    theta_ratio: np.ndarray  # theta_i / theta_h, NaN without income shares

    @property
    def z_plus_p(self) -> float:
        """w_L* - p_2*."""
        return self.z + self.p

    def W(self, i: int, h: int) -> float:
        return float(self.w_diff[i, h])

    @property
    def capital_observed(self) -> bool:
        return bool(np.isfinite(self.y))


def deflated_changes(w_hat, p_hat, income: IncomeShares | None = None) -> DeflatedChanges:
    w = np.asarray(w_hat, dtype=float)
    p = np.asarray(p_hat, dtype=float)
    w_diff = w[:, None] - w[None, :]
    if income is not None:
        ratio = income.factors[:, None] / income.factors[None, :]
    else:
        ratio = np.full((3, 3), np.nan)
    for arr in (w_diff, ratio):
        arr.flags.writeable = False
    return DeflatedChanges(p[0] - p[1], w[T] - p[0], w[K] - p[0], w[L] - p[0], w_diff, ratio)


def from_observed(P: float, X: float, Z: float, Y: float = np.nan, income: IncomeShares | None = None) -> DeflatedChanges:
    """Build from the deflated quantities themselves, with p_1 as numeraire."""
    return deflated_changes([X, Y, Z], [0.0, -P], income)


# ---------------------------------------------------------------------------
# factor-price-change ordering


@dataclass(frozen=True)
class OrderingVerdict:
    applicable: bool
    strong: bool  # P > 0 and X > Z > -P
    ranked: bool | None  # X > Z > Y; None if Y unobserved and not implied
    ranked_by_implication: bool
    crossing_level: float  # common value of Y and Z where their lines cross
    reason: str = ""

    @property
    def establishes_ranking(self) -> bool:
        return bool(self.applicable and self.ranked)


def check_sufficient_ordering(dc: DeflatedChanges, theta_T1: float, theta_T2: float) -> OrderingVerdict:
    """Test P > 0, X > Z > -P, which forces X > Z > Y.

    Along the zero-profit locus, capital's deflated change is
    ``Y - Z = (-P - Z - theta_T2 (X - Z)) / theta_K2``, negative whenever
    Z > -P and X > Z.  The level at which the Y and Z lines cross,
    ``-theta_T1 P / (theta_T1 - theta_T2)``, lies below -P.
    """
    if abs(theta_T1 - theta_T2) <= SIGN_TOL:
        raise DegenerateIntensity("theta_T1 == theta_T2")
    crossing = -theta_T1 * dc.p / (theta_T1 - theta_T2)
    if not dc.p > 0:
        return OrderingVerdict(False, False, None, False, crossing, "terms of trade did not rise (P <= 0)")
    strong = dc.x > dc.z > -dc.p
    if dc.capital_observed:
        ranked = dc.x > dc.z > dc.y
        return OrderingVerdict(True, strong, ranked, False, crossing)
    if strong:
        return OrderingVerdict(True, True, True, True, crossing)
    reason = "X <= Z" if not dc.x > dc.z else "Z <= -P and capital unobserved"
    return OrderingVerdict(True, False, None if dc.x > dc.z else False, False, crossing, reason)


# ---------------------------------------------------------------------------
# admissible sign triples of (a_T0', a_K0', a_L0')

LEMMA2_TRIPLES = {
    "A": (-1, 1, -1),
    "B": (-1, 1, 1),
    "C": (1, 1, -1),
    "D": (-1, -1, 1),
}


def _premises(ranking: IntensityRanking, dc: DeflatedChanges) -> str | None:
    if ranking.order != (T, L, K):
        return "intensity ranking is not theta_T1/theta_T2 > theta_L1/theta_L2 > theta_K1/theta_K2"
    if not dc.p > 0:
        return "P <= 0"
    if dc.capital_observed:
        if not dc.x > dc.z > dc.y:
            return "X > Z > Y fails"
    elif not dc.x > dc.z > -dc.p:
        return "capital unobserved and X > Z > -P fails"
    return None


def lemma2_admissible(ranking: IntensityRanking, dc: DeflatedChanges, known=(None, None, None)) -> frozenset[str]:
    """Letters of the sign triples (a_T0', a_K0', a_L0') compatible with the data.

    ``known`` fixes any component whose sign is observed; None leaves it free.
    """
    problem = _premises(ranking, dc)
    if problem:
        raise NotApplicable(problem)
    return frozenset(
        name
        for name, triple in LEMMA2_TRIPLES.items()
        if all(k is None or k == t for k, t in zip(known, triple))
    )


def aggregate_a0(allocation: AllocationShares | np.ndarray, a_hat) -> np.ndarray:
    """a_i0' = sum_j lam_ij a_ij*."""
    lam = allocation.lam if isinstance(allocation, AllocationShares) else np.asarray(allocation)
    return (lam * np.asarray(a_hat, dtype=float)).sum(axis=1)


def aggregate_sign(signs) -> int | None:
    """Sign of a positively weighted sum given only the signs of its terms."""
    if any(s is None for s in signs):
        return None
    nonzero = {s for s in signs if s != 0}
    if not nonzero:
        return 0
    if len(nonzero) == 1:
        return nonzero.pop()
    return None


# ---------------------------------------------------------------------------
# segment AB


@dataclass(frozen=True)
class SegmentEstimate:
    """Endpoints of the line segment that must contain (S', U').

    Coordinates are NaN where only signs are known.
    """

    point_a: tuple[float, float]
    point_b: tuple[float, float]
    a_signs: tuple[int, int]
    b_signs: tuple[int, int]
    quadrant_iv: bool
    a_left_of_b: bool | None

    def locate(self, ratio) -> tuple[float, float]:
        """(interpolation parameter, collinearity residual) of a point against AB."""
        a = np.asarray(self.point_a)
        b = np.asarray(self.point_b)
        e = np.asarray(tuple(ratio), dtype=float)
        d = b - a
        span = float(d @ d)
        t = float((e - a) @ d / span)
        resid = abs(d[0] * (e - a)[1] - d[1] * (e - a)[0]) / np.sqrt(span)
        return t, float(resid / max(1.0, np.linalg.norm(e)))

    def chain_holds(self, ratio) -> bool:
        """0 < S'_A < S' < S'_B and 0 > U'_A > U' > U'_B."""
        s, u = tuple(ratio)
        return bool(0 < self.point_a[0] < s < self.point_b[0] and 0 > self.point_a[1] > u > self.point_b[1])


def segment_estimate(dc: DeflatedChanges, income: IncomeShares | None, a0) -> SegmentEstimate:
    """Points A and B of the EWS-ratio segment.

    With w the factor-price changes and a0 the aggregated input-coefficient
    changes, a_i0' = sum_h g_ih w_h*.  Eliminating the scale of g leaves a
    line in the (S', U') plane that meets the concavity boundary of the
    economy-wide substitution matrix twice:

    * A = (-W_TL / W_KL, -(theta_L/theta_K) W_LT / W_KT), where g w* vanishes;
    * B = ((theta_K/theta_T) a_K0'/a_T0', a_K0'/a_L0'), where g has rank one.

    ``a0`` holds values, or signs (ints) when magnitudes are unknown.
    """
    a0 = tuple(a0)
    signs_only = all(isinstance(v, (int, np.integer)) or v is None for v in a0)
    a0_signs = tuple(v if signs_only else sign(v) for v in a0)
    if a0_signs[0] == 0:
        raise PointBUndefined("a_T0' = 0")
    if a0_signs[2] == 0:
        raise PointBUndefined("a_L0' = 0")
    if a0_signs != LEMMA2_TRIPLES["C"]:
        raise NotApplicable(f"aggregate input-coefficient signs {a0_signs} are not (+, +, -)")
    if not dc.p > 0:
        raise NotApplicable("P <= 0")

    w_tl = dc.W(T, L)
    if abs(w_tl) <= SIGN_TOL:
        raise PointAUndefined("W_TL = 0 puts A on the vertical axis")
    if dc.capital_observed:
        w_kl, w_kt = dc.W(K, L), dc.W(K, T)
        if abs(w_kl) <= SIGN_TOL or abs(w_kt) <= SIGN_TOL:
            raise PointAUndefined("W_KL or W_KT vanishes")
        if not dc.x > dc.z > dc.y:
            raise NotApplicable("X > Z > Y fails")
        ratio_lk = dc.theta_ratio[L, K]
        point_a = (-w_tl / w_kl, -ratio_lk * dc.W(L, T) / w_kt)
        sign_kl, sign_kt = sign(w_kl), sign(w_kt)
    else:
        if not dc.x > dc.z > -dc.p:
            raise NotApplicable("capital unobserved and X > Z > -P fails")
        # Y < Z < X is implied, so W_KL < 0 and W_KT < 0
        point_a = (np.nan, np.nan)
        sign_kl = sign_kt = -1
    a_signs = (-sign(w_tl) * sign_kl, -sign(dc.W(L, T)) * sign_kt)

    if signs_only:
        point_b = (np.nan, np.nan)
        b_signs = (a0_signs[1] * a0_signs[0], a0_signs[1] * a0_signs[2])
    else:
        a_t, a_k, a_l = (float(v) for v in a0)
        ratio_kt = dc.theta_ratio[K, T]
        point_b = (ratio_kt * a_k / a_t, a_k / a_l)
        b_signs = (sign(point_b[0]), sign(point_b[1]))

    quadrant_iv = a_signs == (1, -1) and b_signs == (1, -1)
    left = None
    if np.isfinite(point_a[0]) and np.isfinite(point_b[0]):
        left = bool(point_a[0] < point_b[0])
    return SegmentEstimate(point_a, point_b, a_signs, b_signs, quadrant_iv, left)


# ---------------------------------------------------------------------------
# subregions and sign patterns


class Subregion(enum.Enum):
    P1 = "P1"
    P2 = "P2"
    P3 = "P3"

    def __lt__(self, other):
        return self.value < other.value


ALL_SUBREGIONS = frozenset(Subregion)

# rows: goods 1, 2; columns: V_T, V_K, V_L
PATTERNS = {
    Subregion.P1: ((1, -1, -1), (-1, 1, 1)),
    Subregion.P2: ((1, -1, 1), (-1, 1, 1)),
    Subregion.P3: ((1, -1, 1), (-1, 1, -1)),
}

_LABOR_COLUMN = {(-1, 1): Subregion.P1, (1, 1): Subregion.P2, (1, -1): Subregion.P3}


def _as_set(subregion) -> frozenset[Subregion]:
    if isinstance(subregion, Subregion):
        return frozenset([subregion])
    return frozenset(Subregion(s) if isinstance(s, str) else s for s in subregion)


def theorem1_pattern(subregion) -> list[list[int | None]]:
    """Rybczynski sign matrix for a subregion or a set of candidates.

    Cells on which every candidate agrees keep their sign; others are None.
    """
    subs = _as_set(subregion)
    if not subs:
        raise ValueError("empty subregion set")
    pats = [PATTERNS[s] for s in sorted(subs)]
    return [[pats[0][j][i] if all(p[j][i] == pats[0][j][i] for p in pats) else None for i in range(3)] for j in range(2)]


def relative_effects_for(subregion) -> dict[str, int | None]:
    """Signs of X_1*/V_i* - X_2*/V_i* implied by a set of candidate subregions."""
    per = [relative_output_signs(PATTERNS[s]) for s in sorted(_as_set(subregion))]
    out = {}
    for i, f in enumerate(FACTORS):
        vals = {p[i] for p in per}
        out[f] = vals.pop() if len(vals) == 1 else None
    return out


def _require_canonical(economy: Economy) -> IntensityRanking:
    ranking = intensity_ranking(economy.distributive, economy.income.goods)
    if not ranking.is_canonical:
        raise NotApplicable(f"intensity ranking {[f.name for f in ranking.order]} is not (T, L, K)")
    return ranking


def subregion_of(economy: Economy) -> Subregion:
    """Subregion read off the labor column of the solved Rybczynski matrix."""
    _require_canonical(economy)
    report = ews(economy)
    if report.ratio.quadrant != 4:
        raise NotStrongRybczynski(f"(S', U') = ({report.ratio.s_prime:.4g}, {report.ratio.u_prime:.4g}) is not in quadrant IV")
    r = rybczynski_matrix(economy).r
    s1, s2 = sign(r[0, L]), sign(r[1, L])
    if s1 == 0 or s2 == 0:
        raise Boundary(f"labor column ({r[0, L]:.3g}, {r[1, L]:.3g}) sits on a subregion boundary")
    return _LABOR_COLUMN[(s1, s2)]


def strip_subregion(economy: Economy) -> Subregion:
    """Subregion guessed from S' against theta_K1/theta_T1 and theta_K2/theta_T2.

    A heuristic: the exact boundaries depend on more than S'.
    """
    theta = economy.theta
    lo, hi = theta[K, 0] / theta[T, 0], theta[K, 1] / theta[T, 1]
    s = ews(economy).ratio.s_prime
    if s < lo:
        return Subregion.P3
    if s < hi:
        return Subregion.P2
    return Subregion.P1


# ---------------------------------------------------------------------------
# refinement with the labor price against each good


@dataclass(frozen=True)
class Refinement:
    subregions: frozenset[Subregion]
    checks: dict = field(default_factory=dict)  # name -> True / False / None (unknown)
    note: str = ""


def corollary_refine(dc: DeflatedChanges, distributive: DistributiveShares, a0=None) -> Refinement:
    """Narrow {P1, P2, P3} using where point A and point B fall.

    * ``wage_vs_importable``: w_L* - p_2* > 0, i.e. S'_A < theta_K2/theta_T2;
    * ``wage_vs_exportable``: w_L* - p_1* < 0, i.e. S'_A > theta_K1/theta_T1;
    * ``b_inside_strip``: S'_B < theta_K2/theta_T2 (needs a0 magnitudes and
      income shares).

    The first two place A between the thresholds, which rules out P3;
    the third also rules out P1.
    """
    theta = distributive.theta
    checks = {
        "wage_vs_importable": bool(dc.z_plus_p > 0),
        "wage_vs_exportable": bool(dc.z < 0),
        "b_inside_strip": None,
    }
    premise = dc.p > 0 and (dc.x > dc.z > dc.y if dc.capital_observed else dc.x > dc.z > -dc.p)
    if a0 is not None:
        a0_signs = tuple(v if isinstance(v, (int, np.integer)) or v is None else sign(v) for v in a0)
        premise = premise and a0_signs == LEMMA2_TRIPLES["C"]
    if not premise:
        return Refinement(ALL_SUBREGIONS, checks, "premises for locating the segment are not met")
    if not (checks["wage_vs_importable"] and checks["wage_vs_exportable"]):
        return Refinement(ALL_SUBREGIONS, checks, "point A is not between the intensity thresholds")
    result = frozenset({Subregion.P1, Subregion.P2})
    numeric = a0 is not None and not any(isinstance(v, (int, np.integer)) or v is None for v in a0)
    if numeric and np.isfinite(dc.theta_ratio[K, T]):
        a_t, a_k, _ = (float(v) for v in a0)
        s_b = dc.theta_ratio[K, T] * a_k / a_t
        checks["b_inside_strip"] = bool(s_b < theta[K, 1] / theta[T, 1])
        if checks["b_inside_strip"]:
            return Refinement(frozenset({Subregion.P2}), checks, "both endpoints lie in P2")
    return Refinement(result, checks, "point A lies in P2; point B may lie in P2 or P1")


# ---------------------------------------------------------------------------
# share of the exportable sector


def share_change(income, p_hats, x_hats) -> tuple[float, float]:
    """(theta_1*, theta_2*) from price and output changes.

    theta_1* = theta_2 [(p_1* - p_2*) + (X_1* - X_2*)] and
    theta_1 theta_1* + theta_2 theta_2* = 0.
    """
    if isinstance(income, IncomeShares):
        theta_1, theta_2 = income.goods
    elif np.ndim(income) == 0:
        theta_1 = float(income)
        theta_2 = 1.0 - theta_1
    else:
        theta_1, theta_2 = (float(v) for v in income)
        if abs(theta_1 + theta_2 - 1) > 1e-9:
            raise ValueError("goods shares must sum to 1")
    if theta_2 == 0:
        raise ZeroDivisionError("theta_2 = 0")
    p1, p2 = p_hats
    x1, x2 = x_hats
    t1 = theta_2 * ((p1 - p2) + (x1 - x2))
    return t1, importable_share_change(theta_1, t1, theta_2)


def importable_share_change(theta_1: float, theta_1_hat: float, theta_2: float | None = None) -> float:
    """theta_2* implied by theta_1* when the two shares sum to one."""
    theta_2 = 1.0 - theta_1 if theta_2 is None else theta_2
    if theta_2 == 0:
        raise ZeroDivisionError("theta_2 = 0")
    return -(theta_1 / theta_2) * theta_1_hat
