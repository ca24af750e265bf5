import numpy as np
import pytest

from threefactor.casestudy import (
    CaseStudyConfig,
    calibrate_sector2,
    config_from_text,
    format_verdict,
    parse_period,
    run_case_study,
)
from threefactor.core import DistributiveShares, derive_allocation
from threefactor.errors import PremiseFailure
from threefactor.histdata import load_dataset


@pytest.fixture(scope="module")
def dataset():
    return load_dataset()


@pytest.fixture(scope="module")
def verdict(dataset):
    return run_case_study(dataset=dataset)


def test_default_verdict(verdict):
    assert verdict.subregions == ("P1", "P2")
    assert verdict.excluded_subregions == ("P3",)
    assert verdict.quadrant_iv is True
    assert verdict.admissible_triples == ("C",)
    assert tuple(verdict.a0_signs) == (1, 1, -1)
    assert verdict.to_dict()["a0_signs"] == ["+", "+", "-"]
    assert verdict.relative_effects == {"T": 1, "K": -1, "L": None}
    d = verdict.to_dict()
    assert d["relative_effects"] == {"T": "+", "K": "-", "L": "indeterminate"}
    assert d["sign_matrix"] == [["+", "-", "?"], ["-", "+", "+"]]


def test_premises_all_pass_in_order(verdict):
    names = [p.name for p in verdict.premises]
    assert names[0] == "intensity_ranking"
    assert names[-1] == "quadrant_iv"
    assert all(p.passed for p in verdict.premises)


def test_factor_prices_and_lambdas(verdict):
    fp = verdict.factor_prices
    assert fp["P"]["percent"] == pytest.approx(176.6, abs=0.1)
    assert fp["X"]["percent"] == pytest.approx(22.1, abs=0.1)
    assert fp["Z"]["percent"] == pytest.approx(-12.5, abs=0.1)
    assert fp["Z_plus_P"] == pytest.approx(164.1, abs=0.1)
    assert verdict.lambdas["lambda_T1"] == pytest.approx(0.895, abs=1e-3)
    assert verdict.lambdas["lambda_L1"] == pytest.approx(0.831, abs=1e-3)


def test_refinement_checks(verdict):
    assert verdict.refinement_checks == {"wage_vs_importable": True, "wage_vs_exportable": True, "b_inside_strip": None}


def test_calibration_reproduces_lambdas(verdict):
    theta2 = calibrate_sector2((0.22, 0.27, 0.51), 0.5, verdict.lambdas["lambda_T1"], verdict.lambdas["lambda_L1"])
    dist = DistributiveShares.from_columns((0.22, 0.27, 0.51), theta2)
    _, alloc = derive_allocation(dist, (0.5, 0.5))
    assert alloc.lam[0, 0] == pytest.approx(verdict.lambdas["lambda_T1"], abs=1e-12)
    assert alloc.lam[2, 0] == pytest.approx(verdict.lambdas["lambda_L1"], abs=1e-12)
    assert sum(theta2) == pytest.approx(1.0)


def test_negative_cotton_coefficient_widens_verdict(dataset):
    v = run_case_study(CaseStudyConfig().with_overrides(a_T2=-1), dataset)
    assert set(v.subregions) == {"P1", "P2", "P3"}
    assert set(v.admissible_triples) == {"A", "B", "C", "D"}
    assert v.notes


def test_falling_terms_of_trade_halts(dataset):
    with pytest.raises(PremiseFailure) as info:
        run_case_study(CaseStudyConfig().with_overrides(P=-1.0), dataset)
    assert info.value.premise == "terms_of_trade_rise"


def test_format_mentions_verdict(verdict):
    text = format_verdict(verdict)
    assert "P1" in text and "P2" in text


def test_structured_verdict_is_deterministic(dataset):
    a = run_case_study(dataset=dataset).to_dict()
    b = run_case_study(dataset=dataset).to_dict()
    assert a == b


def test_config_text():
    cfg = config_from_text("[case_study]\nperiod = 1921:1926\n[overrides]\na_T2 = -\nP = 50\n")
    assert cfg.period == ("1921", "1926")
    assert cfg.overrides == {"a_T2": -1, "P": 50.0}


def test_config_rejects_unknown_override():
    with pytest.raises(ValueError):
        config_from_text("[overrides]\nfoo = 1\n")


def test_parse_period():
    assert parse_period("1920:1927") == ("1920", "1927")
    with pytest.raises(ValueError):
        parse_period("1920")


def test_explicit_sector2_shares(dataset):
    cfg = CaseStudyConfig(theta_sector2=(0.03, 0.85, 0.12))
    v = run_case_study(cfg, dataset)
    np.testing.assert_allclose(v.shares["theta_sector2"], (0.03, 0.85, 0.12))
    assert v.subregions == ("P1", "P2")
