"""Sample a generalized-Leontief economy and compare the linear model with brute force.

Run with ``python demos/oracle_tour.py``.
"""

import numpy as np

from threefactor.classify import strip_subregion, subregion_of
from threefactor.core import ews
from threefactor.hat import ShockVector, rybczynski_matrix, solve_changes
from threefactor.oracle import Constraints, fd_response, fd_rybczynski, sample_admissible
from threefactor.validation import run_validation


def main() -> None:
    sample = sample_admissible(2024, Constraints(quadrant_iv=True))
    econ = sample.economy
    report = ews(econ)
    print("EWS matrix:\n", np.round(report.g, 4))
    print(f"(S', U') = ({report.ratio.s_prime:.4f}, {report.ratio.u_prime:.4f})  labels {report.labels}")

    r = rybczynski_matrix(econ)
    print(r.format())
    print("finite differences:\n", np.round(fd_rybczynski(sample.gl, base=sample.snapshot), 6))
    print("subregion from the labor column:", subregion_of(econ).value, " strip guess:", strip_subregion(econ).value)

    shock = ShockVector([0.01, 0.0], [0.0, 0.005, -0.003])
    resp = solve_changes(econ, shock)
    print("linear response:", np.round(np.concatenate([resp.w_hat, resp.x_hat]), 6))
    print("nonlinear response:", np.round(fd_response(sample.gl, shock, base=sample.snapshot), 6))

    print()
    print(run_validation(seed=1, n=100, shocks_per_economy=10).format())


if __name__ == "__main__":
    main()
