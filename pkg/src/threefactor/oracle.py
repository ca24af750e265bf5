"""Brute-force nonlinear equilibrium for generalized-Leontief economies.

Sector ``j`` has unit cost ``c_j(w) = sum_i sum_h b[j, i, h] * sqrt(w_i * w_h)``
with ``b[j]`` symmetric.  Negative cross coefficients make factors Allen
complements, which Cobb-Douglas or single-elasticity CES sectors cannot do.
The equilibrium is solved in levels by Newton's method; every elasticity
used to check the linear theory is then taken by finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FACTORS, Economy, economy_to_text, ews_matrix, intensity_ranking, read_sections
from .errors import Infeasible, InvalidShares, ModelError, NoEquilibrium, SamplerExhausted
from .hat import ShockVector, solve_changes, system_matrix

MAX_NEWTON = 100
SAMPLER_BUDGET = 10_000
EQ_TOL = 1e-12
# sampled economies with a worse-conditioned linear system are redrawn
MAX_CONDITION = 1e6


# ---------------------------------------------------------------------------
# generalized Leontief primitives


def unit_cost(b: np.ndarray, w: np.ndarray) -> np.ndarray:
    r = np.sqrt(w)
    return np.einsum("jih,i,h->j", b, r, r)


def input_requirements(b: np.ndarray, w: np.ndarray) -> np.ndarray:
    """a[i, j] = dc_j/dw_i = sum_h b[j, i, h] sqrt(w_h / w_i)."""
    r = np.sqrt(w)
    return np.einsum("jih,h->ij", b, r) / r[:, None]


def cost_hessian(b: np.ndarray, w: np.ndarray) -> np.ndarray:
    """H[j, i, h] = d^2 c_j / dw_i dw_h."""
    r = np.sqrt(w)
    hess = 0.5 * b / np.outer(r, r)[None, :, :]
    for j in range(b.shape[0]):
        off = b[j] - np.diag(np.diag(b[j]))
        hess[j][np.diag_indices(3)] = -0.5 * (off @ r) / w ** 1.5
    return hess


def allen_elasticities(b: np.ndarray, w: np.ndarray) -> np.ndarray:
    c = unit_cost(b, w)
    a = input_requirements(b, w)
    hess = cost_hessian(b, w)
    return c[:, None, None] * hess / (a.T[:, :, None] * a.T[:, None, :])


@dataclass(frozen=True)
class GLEconomy:
    b: np.ndarray  # b[j, i, h]
    p: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        b = np.array(self.b, dtype=float)
        if b.shape != (2, 3, 3) or np.any(np.abs(b - b.transpose(0, 2, 1)) > 0):
            raise InvalidShares("GL coefficients must be two symmetric 3x3 blocks")
        p = np.array(self.p, dtype=float).reshape(2)
        v = np.array(self.v, dtype=float).reshape(3)
        if np.any(p <= 0) or np.any(v <= 0):
            raise InvalidShares("prices and endowments must be positive")
        for name, arr in (("b", b), ("p", p), ("v", v)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def with_changes(self, log_p=None, log_v=None) -> GLEconomy:
        p = self.p if log_p is None else self.p * np.exp(log_p)
        v = self.v if log_v is None else self.v * np.exp(log_v)
        return GLEconomy(self.b, p, v)

    def scaled_prices(self, k: float) -> GLEconomy:
        return GLEconomy(self.b, k * self.p, self.v)


@dataclass(frozen=True)
class EquilibriumSnapshot:
    w: np.ndarray
    x: np.ndarray
    a: np.ndarray
    theta: np.ndarray
    lam: np.ndarray
    goods_share: np.ndarray
    factor_share: np.ndarray
    sigma: np.ndarray
    income: float
    iterations: int = 0

    def economy(self) -> Economy:
        return Economy.build(self.theta, self.goods_share, self.sigma)


def residuals(gl: GLEconomy, w: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Relative zero-profit and market-clearing gaps."""
    zp = (unit_cost(gl.b, w) - gl.p) / gl.p
    mc = (input_requirements(gl.b, w) @ x - gl.v) / gl.v
    return np.concatenate([zp, mc])


def _jacobian(gl: GLEconomy, w: np.ndarray, x: np.ndarray) -> np.ndarray:
    a = input_requirements(gl.b, w)
    hess = cost_hessian(gl.b, w)
    jac = np.zeros((5, 5))
    jac[:2, :3] = a.T / gl.p[:, None]
    jac[2:, :3] = np.einsum("jih,j->ih", hess, x) / gl.v[:, None]
    jac[2:, 3:] = a / gl.v[:, None]
    return jac


def snapshot(gl: GLEconomy, w: np.ndarray, x: np.ndarray, iterations: int = 0) -> EquilibriumSnapshot:
    a = input_requirements(gl.b, w)
    if np.any(a <= 0):
        raise Infeasible("nonpositive input requirement at equilibrium")
    income = float(gl.p @ x)
    theta = a * w[:, None] / gl.p[None, :]
    lam = a * x[None, :] / gl.v[:, None]
    goods_share = gl.p * x / income
    factor_share = w * gl.v / income
    sigma = allen_elasticities(gl.b, w)
    return EquilibriumSnapshot(w, x, a, theta, lam, goods_share, factor_share, sigma, income, iterations)


def solve_equilibrium(gl: GLEconomy, guess=None, tol: float = EQ_TOL) -> EquilibriumSnapshot:
    """Newton's method on the five equilibrium conditions.

    Without a guess, start from w proportional to the unit vector, scaled so
    costs match prices on average, and outputs from least squares.
    Steps that would make a price or output nonpositive are halved.
    """
    if guess is None:
        scale = float(np.mean(gl.p / unit_cost(gl.b, np.ones(3))))
        w = np.full(3, scale)
        x = np.linalg.lstsq(input_requirements(gl.b, w), gl.v, rcond=None)[0]
        x = np.where(x > 0, x, gl.v.mean())
    else:
        w, x = (np.array(g, dtype=float) for g in guess)
    for it in range(1, MAX_NEWTON + 1):
        f = residuals(gl, w, x)
        if np.abs(f).max() < tol:
            return snapshot(gl, w, x, it - 1)
        try:
            step = np.linalg.solve(_jacobian(gl, w, x), -f)
        except np.linalg.LinAlgError as exc:
            raise NoEquilibrium(f"singular Jacobian: {exc}") from exc
        t = 1.0
        while True:
            w_new, x_new = w + t * step[:3], x + t * step[3:]
            if np.all(w_new > 0) and np.all(x_new > 0):
                break
            t *= 0.5
            if t < 1e-12:
                raise Infeasible("Newton step cannot keep prices and outputs positive")
        w, x = w_new, x_new
    f = residuals(gl, w, x)
    if np.abs(f).max() < tol:
        return snapshot(gl, w, x, MAX_NEWTON)
    raise NoEquilibrium(f"no convergence after {MAX_NEWTON} iterations (residual {np.abs(f).max():.3g})")


# ---------------------------------------------------------------------------
# finite differences


def _log_state(gl: GLEconomy, base: EquilibriumSnapshot) -> np.ndarray:
    snap = solve_equilibrium(gl, guess=(base.w, base.x))
    return np.log(np.concatenate([snap.w, snap.x]))


def fd_response(gl: GLEconomy, shock: ShockVector, step: float = 1e-6, base=None) -> np.ndarray:
    """Central-difference rates of change (w_T*, w_K*, w_L*, X_1*, X_2*) for a shock.

    The path moves log prices and log endowments along the shock direction;
    ``step`` is the largest component of the perturbation actually applied.
    """
    base = base or solve_equilibrium(gl)
    vec = shock.as_vector()
    size = np.abs(vec).max()
    if size == 0:
        return np.zeros(5)
    d = vec / size * step
    up = _log_state(gl.with_changes(d[:2], d[2:]), base)
    down = _log_state(gl.with_changes(-d[:2], -d[2:]), base)
    return (up - down) / (2 * step) * size


def fd_rybczynski(gl: GLEconomy, step: float = 1e-6, base=None) -> np.ndarray:
    """r[j, i] = d log x_j / d log v_i at fixed goods prices."""
    base = base or solve_equilibrium(gl)
    r = np.zeros((2, 3))
    for i in range(3):
        r[:, i] = fd_response(gl, ShockVector.endowment(i), step, base)[3:]
    return r


def fd_cost_elasticities(b: np.ndarray, w: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """eps[j, i, h] = d log a_ij / d log w_h at constant output."""
    eps = np.zeros((2, 3, 3))
    for h in range(3):
        e = np.zeros(3)
        e[h] = step
        up = np.log(input_requirements(b, w * np.exp(e)))
        down = np.log(input_requirements(b, w * np.exp(-e)))
        eps[:, :, h] = ((up - down) / (2 * step)).T
    return eps


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class Constraints:
    """What a sampled economy must satisfy.

    The factor labels of every draw are permuted so that land is the most
    sector-1-intensive factor and capital the least.
    """

    middle_case: str | None = None  # "sector1" (theta_L1 > theta_L2), "sector2", or None
    quadrant_iv: bool = False
    substitutes_only: bool = False  # no negative GL cross coefficients
    land_share_2: float | None = None  # pin theta_T2 (near-specific-factor limit)
    shock: ShockVector | None = None  # check price-change premises under this shock
    lemma2: bool = False  # P > 0 and w_T* > w_L* > w_K* under ``shock``
    triple: tuple[int, int, int] | None = None  # required signs of (a_T0', a_K0', a_L0')


@dataclass(frozen=True)
class Sample:
    gl: GLEconomy
    snapshot: EquilibriumSnapshot
    economy: Economy
    draws: int


def _draw_block(rng, substitutes_only: bool) -> np.ndarray:
    lo = 0.0 if substitutes_only else -0.3
    blk = np.zeros((3, 3))
    iu = np.triu_indices(3, 1)
    blk[iu] = rng.uniform(lo, 1.0, size=3)
    blk = blk + blk.T
    blk[np.diag_indices(3)] = rng.uniform(0.2, 2.0, size=3)
    return blk


def _block_ok(blk: np.ndarray) -> bool:
    w = np.ones(3)
    if np.any(blk.sum(axis=1) <= 0):
        return False
    hess = cost_hessian(blk[None], w)[0]
    if np.any(np.diag(hess) >= 0):
        return False
    eig = np.linalg.eigvalsh(hess)
    # one zero eigenvalue along w (homogeneity); the other two strictly negative
    return eig[-1] < 1e-10 and eig[-2] < -1e-6


def _canonical_permutation(b: np.ndarray) -> np.ndarray | None:
    a = input_requirements(b, np.ones(3))
    theta = a / a.sum(axis=0)[None, :]
    ratios = theta[:, 0] / theta[:, 1]
    if np.min(np.abs(np.subtract.outer(ratios, ratios))[np.triu_indices(3, 1)]) <= 1e-9:
        return None
    top, mid, bottom = np.argsort(-ratios)
    return np.array([top, bottom, mid])  # new (T, K, L) <- old indices


def _accept(econ: Economy, snap: EquilibriumSnapshot, c: Constraints) -> bool:
    theta = econ.theta
    if c.middle_case == "sector1" and not theta[2, 0] > theta[2, 1] + 1e-9:
        return False
    if c.middle_case == "sector2" and not theta[2, 0] < theta[2, 1] - 1e-9:
        return False
    intensity_ranking(econ.distributive)
    if np.linalg.cond(system_matrix(econ)) > MAX_CONDITION:
        return False
    g = ews_matrix(econ)
    if c.quadrant_iv and not g[1, 0] < -1e-9:
        return False
    if c.shock is not None and (c.lemma2 or c.triple is not None):
        resp = solve_changes(econ, c.shock)
        w = resp.w_hat
        if c.lemma2 and not (c.shock.p_hat[0] - c.shock.p_hat[1] > 0 and w[0] - w[2] > 1e-9 and w[2] - w[1] > 1e-9):
            return False
        if c.triple is not None:
            signs = tuple(int(np.sign(v)) if abs(v) > 1e-9 else 0 for v in resp.a0_prime)
            if signs != tuple(c.triple):
                return False
    return True


def sample_admissible(seed, constraints: Constraints = Constraints(), budget: int = SAMPLER_BUDGET) -> Sample:
    """Deterministic rejection sampler over GL economies solved at w = 1."""
    rng = np.random.default_rng(seed)
    c = constraints
    for draw in range(1, budget + 1):
        b = np.stack([_draw_block(rng, c.substitutes_only) for _ in range(2)])
        x = rng.uniform(0.5, 2.0, size=2)
        if not all(_block_ok(blk) for blk in b):
            continue
        perm = _canonical_permutation(b)
        if perm is None:
            continue
        b = b[:, perm][:, :, perm]
        if c.land_share_2 is not None:
            b = _pin_land_share(b, c.land_share_2)
            if _canonical_permutation(b) is None or not np.array_equal(_canonical_permutation(b), [0, 1, 2]):
                continue
        w = np.ones(3)
        if c.quadrant_iv and not _quick_g_kt(b, x) < -1e-9:
            continue
        p = unit_cost(b, w)
        v = input_requirements(b, w) @ x
        gl = GLEconomy(b, p, v)
        try:
            snap = snapshot(gl, w, x)
            econ = snap.economy()
            if not _accept(econ, snap, c):
                continue
        except ModelError:
            continue
        return Sample(gl, snap, econ, draw)
    raise SamplerExhausted(f"no economy satisfying {constraints} in {budget} draws")


def _quick_g_kt(b: np.ndarray, x: np.ndarray) -> float:
    """g_KT at w = 1 straight from the GL coefficients (cheap pre-filter)."""
    w = np.ones(3)
    a = input_requirements(b, w)
    hess = cost_hessian(b, w)
    lam = a * x[None, :]
    lam = lam / lam.sum(axis=1, keepdims=True)
    # eps[j, i, h] = w_h c_ih / c_i
    return float(sum(lam[1, j] * hess[j, 1, 0] / a[1, j] for j in range(2)))


def _pin_land_share(b: np.ndarray, share: float) -> np.ndarray:
    """Make land nearly specific to sector 1: theta_T2 = share, no land substitution in sector 2."""
    b = b.copy()
    blk = b[1]
    blk[0, :] = 0.0
    blk[:, 0] = 0.0
    rest = blk.sum()
    blk[0, 0] = share * rest / (1 - share)
    b[1] = blk
    return b


def sample_many(seed: int, n: int, constraints: Constraints = Constraints()) -> list[Sample]:
    """n samples from independent child seeds of ``seed``."""
    seqs = np.random.SeedSequence(seed).spawn(n)
    return [sample_admissible(s, constraints) for s in seqs]


# ---------------------------------------------------------------------------
# fixtures


def gl_to_text(gl: GLEconomy, snap: EquilibriumSnapshot) -> str:
    section = {}
    for j in range(2):
        for i in range(3):
            for h in range(i, 3):
                section[f"b{j + 1}_{FACTORS[i]}{FACTORS[h]}"] = gl.b[j, i, h]
    for j in range(2):
        section[f"p_{j + 1}"] = gl.p[j]
    for i, f in enumerate(FACTORS):
        section[f"v_{f}"] = gl.v[i]
    return economy_to_text(snap.economy(), extra={"gl": section})


def gl_from_text(text: str) -> GLEconomy:
    sec = read_sections(text)["gl"]
    b = np.zeros((2, 3, 3))
    for j in range(2):
        for i in range(3):
            for h in range(i, 3):
                b[j, i, h] = b[j, h, i] = sec[f"b{j + 1}_{FACTORS[i]}{FACTORS[h]}"]
    p = [sec["p_1"], sec["p_2"]]
    v = [sec[f"v_{f}"] for f in FACTORS]
    return GLEconomy(b, p, v)
