"""Shared builders and hypothesis strategies for the test suite."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from hypothesis import strategies as st

from threefactor.core import DistributiveShares, Economy

FIXTURES = Path(__file__).parent / "fixtures"
CENTER = np.eye(3) - np.ones((3, 3)) / 3


def golden_text() -> str:
    return (FIXTURES / "golden_gl.ini").read_text()


def allen_from_factor(theta_col: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Allen matrix whose curvature matrix theta_i theta_h sigma_ih is -D A A^T D.

    D projects out the direction of theta, so homogeneity holds exactly and
    the curvature matrix is negative semidefinite by construction.
    """
    d = np.eye(3) - np.outer(np.ones(3), theta_col)  # rows sum against theta to zero
    q = -(d.T @ a @ a.T @ d)
    q = q / np.outer(theta_col, theta_col)
    return (q + q.T) / 2


def cobb_douglas_sigma(theta: np.ndarray) -> np.ndarray:
    sigma = np.ones((2, 3, 3))
    for j in range(2):
        for i in range(3):
            sigma[j, i, i] = -(1 - theta[i, j]) / theta[i, j]
    return sigma


def economy_from_draw(raw_theta, goods, a1, a2) -> Economy:
    theta = np.asarray(raw_theta, dtype=float)
    theta = theta / theta.sum(axis=0)
    sigma = np.stack([allen_from_factor(theta[:, j], np.asarray(a, dtype=float)) for j, a in enumerate((a1, a2))])
    return Economy.build(DistributiveShares(theta), (goods, 1 - goods), sigma)


share = st.floats(0.05, 1.0)
coef = st.floats(-1.0, 1.0)
theta_draw = st.lists(st.lists(share, min_size=2, max_size=2), min_size=3, max_size=3)
factor_draw = st.lists(st.lists(coef, min_size=3, max_size=3), min_size=3, max_size=3)


@st.composite
def economies(draw):
    """Valid economies with generic Allen matrices (complements allowed)."""
    return economy_from_draw(draw(theta_draw), draw(st.floats(0.1, 0.9)), draw(factor_draw), draw(factor_draw))


def is_generic(economy: Economy, tol: float = 1e-6) -> bool:
    """Rejects draws whose own elasticities or intensity ratios are nearly degenerate."""
    sig = economy.sigma
    diag_ok = all(sig[j, i, i] < -tol for j in range(2) for i in range(3))
    r = economy.distributive.ratios()
    gaps = np.abs(np.subtract.outer(r, r))[np.triu_indices(3, 1)]
    return bool(diag_ok and gaps.min() > 1e-6)


# criterion number -> (passed, one-line detail); filled by the acceptance suite
ACCEPTANCE: dict[int, tuple[bool, str]] = {}
