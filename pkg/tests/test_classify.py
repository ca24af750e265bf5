import numpy as np
import pytest

from helpers import golden_text
from threefactor.classify import (
    LEMMA2_TRIPLES,
    Subregion,
    aggregate_a0,
    aggregate_sign,
    check_sufficient_ordering,
    corollary_refine,
    deflated_changes,
    from_observed,
    importable_share_change,
    lemma2_admissible,
    relative_effects_for,
    segment_estimate,
    share_change,
    strip_subregion,
    subregion_of,
    theorem1_pattern,
)
from threefactor.core import AllenMatrix, DistributiveShares, Economy, IncomeShares, ews, intensity_ranking
from threefactor.errors import (
    Boundary,
    DegenerateIntensity,
    NotApplicable,
    NotStrongRybczynski,
    PointAUndefined,
    PointBUndefined,
)
from threefactor.hat import ShockVector, rybczynski_matrix, solve_changes
from threefactor.oracle import GLEconomy, gl_from_text, solve_equilibrium

CASE_THETA = DistributiveShares(
    np.column_stack([[0.22, 0.27, 0.51], [0.02578943926780745, 0.8701423087600879, 0.1040682519721047]])
)
THAI = from_observed(P=1.766, X=0.221, Z=-0.125)


# ---------------------------------------------------------------- deflation


def test_uniform_change_deflates_to_zero():
    dc = deflated_changes([0.04, 0.04, 0.04], [0.04, 0.04])
    assert dc.p == 0
    assert dc.x == dc.y == dc.z == 0
    assert np.all(dc.w_diff == 0)


def test_from_observed_recovers_inputs():
    assert THAI.p == pytest.approx(1.766)
    assert THAI.x == pytest.approx(0.221)
    assert THAI.z == pytest.approx(-0.125)
    assert THAI.z_plus_p == pytest.approx(1.641)
    assert not THAI.capital_observed


# ---------------------------------------------------------------- ordering


def test_thai_ordering_holds_by_implication():
    v = check_sufficient_ordering(THAI, 0.22, 0.0258)
    assert v.applicable and v.strong and v.ranked_by_implication
    assert v.establishes_ranking
    assert v.crossing_level < -THAI.p


def test_ordering_not_applicable_without_terms_of_trade_rise():
    v = check_sufficient_ordering(from_observed(P=-0.1, X=0.2, Z=0.0), 0.3, 0.1)
    assert not v.applicable
    assert not v.establishes_ranking


def test_ordering_fails_when_land_lags_labor():
    v = check_sufficient_ordering(from_observed(P=0.5, X=-0.1, Z=0.1), 0.3, 0.1)
    assert v.applicable and v.ranked is False


def test_ordering_degenerate_land_shares():
    with pytest.raises(DegenerateIntensity):
        check_sufficient_ordering(THAI, 0.2, 0.2)


def test_implied_capital_is_below_labor_on_zero_profit_locus():
    theta = CASE_THETA.theta
    P, X, Z = 1.766, 0.221, -0.125
    # p_2 fixed at -P against p_1 = 0: solve sector-2 zero profit for Y
    Y = (-P - theta[0, 1] * X - theta[2, 1] * Z) / theta[1, 1]
    assert X > Z > Y


# ---------------------------------------------------------------- Lemma 2


def _canonical_ranking():
    return intensity_ranking(CASE_THETA)


def test_lemma2_full_set():
    assert lemma2_admissible(_canonical_ranking(), THAI) == {"A", "B", "C", "D"}


def test_lemma2_land_coefficient_positive_gives_c():
    assert lemma2_admissible(_canonical_ranking(), THAI, known=(1, None, None)) == {"C"}
    assert LEMMA2_TRIPLES["C"] == (1, 1, -1)


def test_lemma2_capital_negative_gives_d():
    assert lemma2_admissible(_canonical_ranking(), THAI, known=(None, -1, None)) == {"D"}


def test_lemma2_premise_failure():
    with pytest.raises(NotApplicable):
        lemma2_admissible(_canonical_ranking(), from_observed(P=-0.2, X=0.1, Z=0.0))


# ---------------------------------------------------------------- aggregation


def test_aggregate_a0_hand_example():
    lam = np.array([[0.9, 0.1], [0.5, 0.5], [0.5, 0.5]])
    a_hat = np.array([[0.01, -0.2], [0.0, 0.0], [0.0, 0.0]])
    assert aggregate_a0(lam, a_hat)[0] == pytest.approx(-0.011, abs=1e-15)


def test_aggregate_a0_zero():
    assert np.all(aggregate_a0(np.full((3, 2), 0.5), np.zeros((3, 2))) == 0)


@pytest.mark.parametrize(
    "signs, expected", [((1, 1), 1), ((1, 0), 1), ((-1, -1), -1), ((0, 0), 0), ((1, -1), None), ((1, None), None)]
)
def test_aggregate_sign(signs, expected):
    assert aggregate_sign(signs) == expected


# ---------------------------------------------------------------- segment AB


def test_segment_signs_for_thai_pattern():
    seg = segment_estimate(THAI, None, (1, 1, -1))
    assert seg.a_signs == (1, -1)
    assert seg.b_signs == (1, -1)
    assert seg.quadrant_iv


def test_segment_point_a_undefined():
    dc = deflated_changes([0.01, -0.02, 0.01], [0.0, -0.05])
    with pytest.raises(PointAUndefined):
        segment_estimate(dc, None, (1, 1, -1))


def test_segment_point_b_undefined():
    income = IncomeShares((0.5, 0.5), (0.3, 0.3, 0.4))
    dc = deflated_changes([0.05, -0.02, 0.01], [0.0, -0.05], income)
    with pytest.raises(PointBUndefined):
        segment_estimate(dc, income, (0.0, 0.1, -0.1))
    with pytest.raises(PointBUndefined):
        segment_estimate(dc, income, (0.2, 0.1, 1e-14))


def test_segment_requires_triple_c():
    with pytest.raises(NotApplicable):
        segment_estimate(THAI, None, (-1, 1, -1))


def test_segment_contains_true_ratio():
    """Sampled economies with a (+, +, -) triple put (S', U') on segment AB between the endpoints."""
    from threefactor.oracle import Constraints, sample_many

    rng = np.random.default_rng(3)
    found = 0
    for sample in sample_many(31, 60, Constraints(quadrant_iv=True)):
        econ = sample.economy
        for _ in range(20):
            shock = ShockVector(rng.normal([0.05, 0.0], 0.05), rng.normal(0.0, 0.1, size=3))
            resp = solve_changes(econ, shock)
            w = resp.w_hat
            dc = deflated_changes(w, shock.p_hat, econ.income)
            if not (dc.p > 0 and w[0] > w[2] > w[1]) or tuple(np.sign(resp.a0_prime)) != (1, 1, -1):
                continue
            seg = segment_estimate(dc, econ.income, resp.a0_prime)
            ratio = ews(econ).ratio
            t, resid = seg.locate(ratio)
            assert resid < 1e-6
            assert 0 < t < 1
            assert seg.chain_holds(ratio)
            found += 1
    assert found >= 5


# ---------------------------------------------------------------- patterns


def test_patterns():
    assert theorem1_pattern(Subregion.P1) == [[1, -1, -1], [-1, 1, 1]]
    assert theorem1_pattern(Subregion.P2) == [[1, -1, 1], [-1, 1, 1]]
    assert theorem1_pattern(Subregion.P3) == [[1, -1, 1], [-1, 1, -1]]


def test_pattern_intersection():
    assert theorem1_pattern({"P1", "P2"}) == [[1, -1, None], [-1, 1, 1]]
    both = theorem1_pattern(set(Subregion))
    assert both[0][2] is None and both[1][2] is None
    assert [row[0] for row in both] == [1, -1]


def test_relative_effects_for_candidates():
    assert relative_effects_for({"P1", "P2"}) == {"T": 1, "K": -1, "L": None}
    assert relative_effects_for(Subregion.P1)["L"] == -1
    assert relative_effects_for(Subregion.P3)["L"] == 1


def test_empty_candidate_set():
    with pytest.raises(ValueError):
        theorem1_pattern(set())


# ---------------------------------------------------------------- subregions


@pytest.fixture(scope="module")
def golden_gl():
    return gl_from_text(golden_text())


def test_golden_is_p2(golden_gl):
    econ = solve_equilibrium(golden_gl).economy()
    assert subregion_of(econ) is Subregion.P2
    assert strip_subregion(econ) in set(Subregion)


def test_not_strong_rybczynski():
    theta = np.array([[0.4, 0.2], [0.2, 0.5], [0.4, 0.3]])
    sigma = AllenMatrix.from_offdiagonal(DistributiveShares(theta), (1.0, 1.0, 1.0), (1.0, 1.0, 1.0))
    econ = Economy.build(theta, (0.5, 0.5), sigma)
    with pytest.raises(NotStrongRybczynski):
        subregion_of(econ)


def test_boundary_continuation(golden_gl):
    """Shrinking the land-capital complementarity in sector 1 moves the labor cell for good 1 through zero."""
    base = golden_gl.b
    values = []
    grid = np.linspace(0.0, 1.0, 41)
    for t in grid:
        b = base.copy()
        b[0, 0, 1] = b[0, 1, 0] = base[0, 0, 1] * (1 + 2 * t)
        gl = GLEconomy(b, golden_gl.p, golden_gl.v)
        econ = solve_equilibrium(gl).economy()
        values.append(rybczynski_matrix(econ).r[0, 2])
    values = np.array(values)
    crossing = np.nonzero(np.diff(np.sign(values)))[0]
    assert crossing.size == 1
    k = crossing[0]
    lo, hi = grid[k], grid[k + 1]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        b = base.copy()
        b[0, 0, 1] = b[0, 1, 0] = base[0, 0, 1] * (1 + 2 * mid)
        econ = solve_equilibrium(GLEconomy(b, golden_gl.p, golden_gl.v)).economy()
        v = rybczynski_matrix(econ).r[0, 2]
        if np.sign(v) == np.sign(values[k]):
            lo = mid
        else:
            hi = mid
        if abs(v) <= 1e-12:
            break
    with pytest.raises(Boundary):
        subregion_of(econ)
    sides = set()
    for t in (grid[k], grid[k + 1]):
        b = base.copy()
        b[0, 0, 1] = b[0, 1, 0] = base[0, 0, 1] * (1 + 2 * t)
        sides.add(subregion_of(solve_equilibrium(GLEconomy(b, golden_gl.p, golden_gl.v)).economy()))
    assert sides == {Subregion.P1, Subregion.P2}


# ---------------------------------------------------------------- refinement


def test_refine_thai_case():
    ref = corollary_refine(THAI, CASE_THETA, (1, 1, -1))
    assert ref.subregions == {Subregion.P1, Subregion.P2}
    assert ref.checks["b_inside_strip"] is None


def test_refine_all_conditions_gives_p2():
    theta = CASE_THETA.theta
    income = IncomeShares((0.5, 0.5), theta @ np.array([0.5, 0.5]))
    dc = deflated_changes([0.22, np.nan, -0.125], [0.0, -1.766], income)
    theta_kt = income.factors[1] / income.factors[0]
    # pick a_K0'/a_T0' so that theta_KT * a_K0'/a_T0' is below theta_K2/theta_T2
    limit = theta[1, 1] / theta[0, 1] / theta_kt
    ref = corollary_refine(dc, CASE_THETA, (1.0, 0.5 * limit, -1.0))
    assert ref.subregions == {Subregion.P2}
    assert ref.checks["b_inside_strip"] is True


def test_refine_wage_above_exportable_gives_no_refinement():
    dc = from_observed(P=0.5, X=0.3, Z=0.1)
    ref = corollary_refine(dc, CASE_THETA, (1, 1, -1))
    assert ref.subregions == set(Subregion)
    assert ref.checks["wage_vs_exportable"] is False


def test_refinement_soundness_on_sampled_economies():
    from threefactor.oracle import Constraints, sample_many

    shock = ShockVector.prices(0.01, 0.0)
    hits = 0
    for sample in sample_many(77, 150, Constraints(quadrant_iv=True)):
        econ = sample.economy
        try:
            sub = subregion_of(econ)
        except Boundary:
            continue
        resp = solve_changes(econ, shock)
        dc = deflated_changes(resp.w_hat, shock.p_hat, econ.income)
        if dc.z < 0 and dc.z_plus_p > 0:
            hits += 1
            assert sub is Subregion.P2
    assert hits > 10


# ---------------------------------------------------------------- share change


def test_share_change_four_percent():
    t1, t2 = share_change(0.8, (5.0, 0.0), (0.0, 0.0))
    assert t1 == pytest.approx(1.0, abs=1e-12)
    assert t2 == pytest.approx(-4.0, abs=1e-12)
    assert importable_share_change(0.8, 1.0) == pytest.approx(-4.0, abs=1e-12)
    assert f"{importable_share_change(0.8, 1.0):.3f}" == "-4.000"


def test_share_change_no_relative_change():
    assert share_change((0.3, 0.7), (0.02, 0.02), (0.01, 0.01)) == (0.0, 0.0)


def test_share_change_hand_example():
    t1, t2 = share_change(0.5, (10.0, 0.0), (2.0, 0.0))
    assert t1 == pytest.approx(6.0)
    assert t2 == pytest.approx(-6.0)


def test_share_change_zero_importable():
    with pytest.raises(ZeroDivisionError):
        importable_share_change(1.0, 1.0)


def test_share_changes_are_consistent_with_levels():
    theta_1, p, x = 0.6, (0.01, -0.02), (0.005, 0.0)
    t1, t2 = share_change(theta_1, p, x)
    v1, v2 = theta_1, 1 - theta_1
    n1, n2 = v1 * np.exp(p[0] + x[0]), v2 * np.exp(p[1] + x[1])
    new_share = n1 / (n1 + n2)
    assert np.log(new_share / theta_1) == pytest.approx(t1, rel=2e-2)
    assert theta_1 * t1 + (1 - theta_1) * t2 == pytest.approx(0.0, abs=1e-15)
