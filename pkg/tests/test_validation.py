import pytest

from threefactor.errors import SamplerExhausted
from threefactor.oracle import Constraints
from threefactor.validation import parse_constraints, run_validation


@pytest.fixture(scope="module")
def summary():
    return run_validation(seed=3, n=60, shocks_per_economy=10)


def test_small_batch_passes(summary):
    assert summary.passed
    for name in ("row_sums", "reciprocity", "residuals", "oracle_equivalence", "theorem1"):
        assert summary.families[name].checked == 60
        assert summary.families[name].failures == 0


def test_informational_families_not_asserted(summary):
    assert not summary.families["refinement_exactness"].asserted
    assert not summary.families["refinement_mixed_shocks"].asserted


def test_subregion_counts_cover_batch(summary):
    assert sum(summary.subregion_counts.values()) + summary.boundary_cases == 60


def test_summary_is_reproducible(summary):
    again = run_validation(seed=3, n=60, shocks_per_economy=10)
    assert again.to_dict() == summary.to_dict()


def test_format_lines(summary):
    text = summary.format()
    assert "overall: PASS" in text
    assert "strip band agreement" in text


def test_zero_economies_rejected():
    with pytest.raises(ValueError):
        run_validation(seed=1, n=0)


def test_unsatisfiable_constraints():
    with pytest.raises(SamplerExhausted):
        run_validation(seed=1, n=1, constraints=parse_constraints("quadrant-iv,substitutes-only"))


def test_parse_constraints():
    c = parse_constraints("quadrant-iv,middle-sector1,land-share-2=0.01")
    assert c == Constraints(quadrant_iv=True, middle_case="sector1", land_share_2=0.01)
    assert parse_constraints("none") == Constraints()
    with pytest.raises(ValueError):
        parse_constraints("bogus")
