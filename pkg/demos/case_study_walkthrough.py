"""Step through the Thailand 1920-1927 classification one stage at a time.

Run with ``python demos/case_study_walkthrough.py``.
"""

from threefactor.casestudy import CaseStudyConfig, format_verdict, run_case_study
from threefactor.classify import from_observed, relative_effects_for, theorem1_pattern
from threefactor.core import sign_char
from threefactor.errors import PremiseFailure
from threefactor.histdata import compute_factor_price_changes, lambda_estimates, load_dataset, yield_trend_sign


def main() -> None:
    ds = load_dataset()

    # deflated factor prices and the terms of trade, computed on levels
    fp = compute_factor_price_changes(ds["wage"], ds["rice_price"], ds["land_price"], ds["shirting_price"])
    for q in (fp.P, fp.X, fp.Z):
        print(f"{q.quantity}: {q.start_value:.3f} -> {q.end_value:.3f}  ({q.percent:+.1f}%, {q.provenance})")
    print(f"wage in the importable: {fp.z_plus_p:+.1f}%")

    # land use per unit of output moves against the yield
    for crop in ("rice", "cotton"):
        t = yield_trend_sign(ds[f"{crop}_production"], ds[f"{crop}_area"], crop, (1920, 1927))
        print(f"{crop} yield {t.start_value:.1f} -> {t.end_value:.1f} kg/rai, land coefficient {sign_char(t.coefficient_sign)}")

    est = lambda_estimates(ds.crops, labor=ds.labor)
    print(f"lambda_T1 = {est.lambda_T1:.4f}, lambda_L1 = {est.lambda_L1:.4f}")

    dc = from_observed(fp.P.percent / 100, fp.X.percent / 100, fp.Z.percent / 100)
    print(f"labor falls against rice ({dc.z:+.3f}) and rises against shirting ({dc.z_plus_p:+.3f})")

    # the candidate subregions and what they leave undetermined
    print("sign matrix for {P1, P2}:", theorem1_pattern({"P1", "P2"}))
    print("relative output effects:", relative_effects_for({"P1", "P2"}))

    print()
    print(format_verdict(run_case_study(dataset=ds)))

    # what-if: cotton yields rising over the period would undo the land premise
    widened = run_case_study(CaseStudyConfig().with_overrides(a_T2=-1), ds)
    print("\nwith a falling cotton land coefficient:", widened.subregions)

    try:
        run_case_study(CaseStudyConfig().with_overrides(P=-5.0), ds)
    except PremiseFailure as exc:
        print("with falling terms of trade the chain stops at:", exc.premise)


if __name__ == "__main__":
    main()
