import numpy as np
import pytest

from helpers import golden_text
from threefactor.core import economy_from_text, ews_matrix
from threefactor.errors import SamplerExhausted
from threefactor.hat import ShockVector, rybczynski_matrix, solve_changes
from threefactor.oracle import (
    Constraints,
    allen_elasticities,
    fd_cost_elasticities,
    fd_response,
    fd_rybczynski,
    gl_from_text,
    gl_to_text,
    input_requirements,
    residuals,
    sample_admissible,
    sample_many,
    solve_equilibrium,
    unit_cost,
)

X_GOLDEN = np.array([1.708726107758, 0.821340723654])
THETA_GOLDEN = np.array(
    [[0.302388643314, 0.251239866543], [0.170776605816, 0.227309462748], [0.52683475087, 0.521450670709]]
)
LAM_GOLDEN = np.array(
    [[0.689249508106, 0.310750491894], [0.580628019794, 0.419371980206], [0.65057788134, 0.34942211866]]
)
G_GOLDEN = np.array(
    [
        [-0.214637371314, -0.017796128356, 0.23243349967],
        [-0.026545087028, -0.305615308219, 0.332160395247],
        [0.125925189419, 0.120643274441, -0.24656846386],
    ]
)


@pytest.fixture(scope="module")
def gl():
    return gl_from_text(golden_text())


@pytest.fixture(scope="module")
def snap(gl):
    return solve_equilibrium(gl)


def test_golden_equilibrium_frozen(gl, snap):
    np.testing.assert_allclose(snap.w, 1.0, atol=1e-10)
    np.testing.assert_allclose(snap.x, X_GOLDEN, atol=1e-10)
    assert np.abs(residuals(gl, snap.w, snap.x)).max() < 1e-10
    np.testing.assert_allclose(snap.theta.sum(axis=0), 1.0, atol=1e-12)
    np.testing.assert_allclose(snap.theta, THETA_GOLDEN, atol=1e-10)
    np.testing.assert_allclose(snap.lam, LAM_GOLDEN, atol=1e-10)
    np.testing.assert_allclose(snap.goods_share, [0.648239130681, 0.351760869319], atol=1e-10)
    np.testing.assert_allclose(snap.factor_share, [0.284396505132, 0.190662652715, 0.524940842152], atol=1e-10)


def test_golden_ews_frozen(snap):
    econ = snap.economy()
    g = ews_matrix(econ)
    np.testing.assert_allclose(g, G_GOLDEN, atol=1e-10)
    assert g[1, 0] / g[2, 0] == pytest.approx(-0.21080045343488624, abs=1e-10)
    assert g[2, 1] / g[2, 0] == pytest.approx(0.958055135729431, abs=1e-10)


def test_fixture_economy_section_matches_solution(snap):
    stored = economy_from_text(golden_text())
    np.testing.assert_allclose(stored.theta, snap.theta, atol=1e-12)
    np.testing.assert_allclose(stored.sigma, snap.sigma, atol=1e-10)


def test_fixture_round_trip(gl, snap):
    back = gl_from_text(gl_to_text(gl, snap))
    np.testing.assert_array_equal(back.b, gl.b)
    np.testing.assert_array_equal(back.p, gl.p)
    np.testing.assert_array_equal(back.v, gl.v)


def test_price_scaling_scales_factor_prices(gl, snap):
    scaled = solve_equilibrium(gl.scaled_prices(3.0), guess=(3 * snap.w, snap.x))
    np.testing.assert_allclose(scaled.w, 3 * snap.w, rtol=1e-10)
    np.testing.assert_allclose(scaled.x, snap.x, rtol=1e-10)


def test_default_start_converges(gl):
    assert solve_equilibrium(gl).iterations <= 100


def test_fd_rybczynski_matches_hat(gl, snap):
    r_fd = fd_rybczynski(gl, base=snap)
    r = rybczynski_matrix(snap.economy()).r
    assert np.linalg.norm(r - r_fd) / np.linalg.norm(r) < 1e-4
    np.testing.assert_allclose(r_fd.sum(axis=1), 1.0, atol=1e-6)


def test_fd_response_matches_hat(gl, snap):
    shock = ShockVector([0.01, -0.004], [0.003, -0.01, 0.006])
    resp = solve_changes(snap.economy(), shock)
    hat = np.concatenate([resp.w_hat, resp.x_hat])
    fd = fd_response(gl, shock, base=snap)
    assert np.linalg.norm(hat - fd) / np.linalg.norm(fd) < 1e-4


def test_fd_error_falls_with_step(gl, snap):
    """Central differences are second order: halving the step cuts the error about fourfold."""
    b, w = gl.b, snap.w * np.array([1.0, 1.3, 0.8])
    exact = allen_elasticities(b, w) * (input_requirements(b, w) * w[:, None] / unit_cost(b, w)[None, :]).T[:, None, :]
    errs = [np.abs(fd_cost_elasticities(b, w, step=h) - exact).max() for h in (1e-2, 5e-3)]
    assert 3.0 < errs[0] / errs[1] < 5.0


def test_allen_analytic_matches_fd(gl, snap):
    b, w = gl.b, np.array([0.7, 1.4, 1.1])
    theta = (input_requirements(b, w) * w[:, None] / unit_cost(b, w)[None, :]).T  # theta[j, h]
    eps_from_sigma = allen_elasticities(b, w) * theta[:, None, :]
    np.testing.assert_allclose(fd_cost_elasticities(b, w, step=1e-5), eps_from_sigma, atol=1e-5)


def test_allen_symmetry_and_homogeneity(gl):
    w = np.array([0.9, 1.2, 1.05])
    sig = allen_elasticities(gl.b, w)
    np.testing.assert_allclose(sig, sig.transpose(0, 2, 1), atol=1e-12)
    theta = input_requirements(gl.b, w) * w[:, None] / unit_cost(gl.b, w)[None, :]
    for j in range(2):
        np.testing.assert_allclose(sig[j] @ theta[:, j], 0.0, atol=1e-12)


def test_sampler_is_deterministic():
    a = sample_admissible(123, Constraints(quadrant_iv=True))
    b = sample_admissible(123, Constraints(quadrant_iv=True))
    np.testing.assert_array_equal(a.gl.b, b.gl.b)
    np.testing.assert_array_equal(a.gl.v, b.gl.v)


def test_sample_many_children_differ():
    s = sample_many(5, 3)
    assert not np.array_equal(s[0].gl.b, s[1].gl.b)


def test_quadrant_iv_constraint_holds():
    for sample in sample_many(11, 20, Constraints(quadrant_iv=True)):
        g = ews_matrix(sample.economy)
        assert g[1, 0] < 0
        assert g[2, 0] > 0


def test_unsatisfiable_constraints_exhaust_budget():
    with pytest.raises(SamplerExhausted):
        sample_admissible(1, Constraints(quadrant_iv=True, substitutes_only=True), budget=500)


def test_near_specific_land_limit():
    sample = sample_admissible(9, Constraints(land_share_2=0.001))
    theta = sample.economy.theta
    assert theta[0, 1] == pytest.approx(0.001, rel=1e-6)
    r = rybczynski_matrix(sample.economy)
    np.testing.assert_allclose(r.row_sums(), 1.0, atol=1e-8)
    # with land almost specific to sector 1, extra land expands sector 1 and contracts sector 2
    assert r.signs()[:, 0].tolist() == [1, -1]


def test_canonical_labels():
    sample = sample_admissible(2024)
    ratios = sample.economy.distributive.ratios()
    assert ratios[0] > ratios[2] > ratios[1]
