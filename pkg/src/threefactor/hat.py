"""Linear comparative statics of the 3x2 model in rates of change.

The system stacks two zero-profit conditions and three full-employment
conditions::

    sum_i theta_ij w_i*                = p_j*      j = 1, 2
    sum_h g_ih w_h* + sum_j lam_ij X_j* = V_i*      i = T, K, L

with unknowns ordered (w_T*, w_K*, w_L*, X_1*, X_2*).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import FACTORS, SIGN_TOL, Economy, cost_share_elasticities, ews_matrix, sign, sign_char
from .errors import SingularSystem

COND_WARN = 1e8
COND_SINGULAR = 1e13


@dataclass(frozen=True)
class ShockVector:
    p_hat: np.ndarray
    v_hat: np.ndarray

    def __post_init__(self):
        p = np.array(self.p_hat, dtype=float).reshape(2)
        v = np.array(self.v_hat, dtype=float).reshape(3)
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(v))):
            raise ValueError("shock components must be finite")
        object.__setattr__(self, "p_hat", p)
        object.__setattr__(self, "v_hat", v)

    @classmethod
    def prices(cls, p1: float, p2: float = 0.0) -> ShockVector:
        return cls([p1, p2], np.zeros(3))

    @classmethod
    def endowment(cls, factor: int, size: float = 1.0) -> ShockVector:
        v = np.zeros(3)
        v[factor] = size
        return cls(np.zeros(2), v)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.p_hat, self.v_hat])

    def __add__(self, other: ShockVector) -> ShockVector:
        return ShockVector(self.p_hat + other.p_hat, self.v_hat + other.v_hat)

    def __mul__(self, k: float) -> ShockVector:
        return ShockVector(k * self.p_hat, k * self.v_hat)

    __rmul__ = __mul__


@dataclass(frozen=True)
class ResponseBundle:
    shock: ShockVector
    w_hat: np.ndarray
    x_hat: np.ndarray
    a_hat: np.ndarray  # a_hat[i, j]
    a0_prime: np.ndarray
    condition: float

    def zero_profit_residual(self, economy: Economy) -> np.ndarray:
        return economy.theta.T @ self.w_hat - self.shock.p_hat

    def full_employment_residual(self, economy: Economy) -> np.ndarray:
        return (economy.lam * (self.a_hat + self.x_hat[None, :])).sum(axis=1) - self.shock.v_hat

    def cost_share_residual(self, economy: Economy) -> np.ndarray:
        return (economy.theta * self.a_hat).sum(axis=0)

    def to_dict(self) -> dict[str, float]:
        out = {}
        for j in range(2):
            out[f"p_hat_{j + 1}"] = float(self.shock.p_hat[j])
        for i, f in enumerate(FACTORS):
            out[f"V_hat_{f}"] = float(self.shock.v_hat[i])
        for i, f in enumerate(FACTORS):
            out[f"w_hat_{f}"] = float(self.w_hat[i])
        for j in range(2):
            out[f"X_hat_{j + 1}"] = float(self.x_hat[j])
        for i, f in enumerate(FACTORS):
            for j in range(2):
                out[f"a_hat_{f}{j + 1}"] = float(self.a_hat[i, j])
        for i, f in enumerate(FACTORS):
            out[f"a0_prime_{f}"] = float(self.a0_prime[i])
        return out


def system_matrix(economy: Economy) -> np.ndarray:
    m = np.zeros((5, 5))
    m[:2, :3] = economy.theta.T
    m[2:, :3] = ews_matrix(economy)
    m[2:, 3:] = economy.lam
    return m


def _solve(economy: Economy, rhs: np.ndarray) -> tuple[np.ndarray, float]:
    m = system_matrix(economy)
    cond = float(np.linalg.cond(m))
    if not np.isfinite(cond) or cond > COND_SINGULAR:
        raise SingularSystem(f"comparative-statics system is singular (condition {cond:.3g})")
    if cond > COND_WARN:
        warnings.warn(f"ill-conditioned comparative-statics system (condition {cond:.3g})", stacklevel=3)
    try:
        return np.linalg.solve(m, rhs), cond
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc


def solve_changes(economy: Economy, shock: ShockVector) -> ResponseBundle:
    sol, cond = _solve(economy, shock.as_vector())
    w, x = sol[:3], sol[3:]
    eps = cost_share_elasticities(economy)
    a_hat = np.einsum("jih,h->ij", eps, w)
    a0 = (economy.lam * a_hat).sum(axis=1)
    return ResponseBundle(shock, w, x, a_hat, a0, cond)


@dataclass(frozen=True)
class RybczynskiMatrix:
    """r[j, i] = X_j* / V_i* at constant goods prices."""

    r: np.ndarray

    def signs(self, tol: float = SIGN_TOL) -> np.ndarray:
        return np.vectorize(lambda v: sign(v, tol))(self.r).astype(int)

    def row_sums(self) -> np.ndarray:
        return self.r.sum(axis=1)

    def to_dict(self) -> dict[str, float]:
        return {f"X{j + 1}/V_{f}": float(self.r[j, i]) for j in range(2) for i, f in enumerate(FACTORS)}

    def format(self) -> str:
        rows = []
        for j in range(2):
            cells = " ".join(f"{self.r[j, i]:+.6f}" for i in range(3))
            rows.append(f"X{j + 1}*: {cells}")
        return "\n".join(["       V_T*      V_K*      V_L*"] + rows)


def rybczynski_matrix(economy: Economy) -> RybczynskiMatrix:
    rhs = np.zeros((5, 3))
    rhs[2:, :] = np.eye(3)
    sol, _ = _solve(economy, rhs)
    r = sol[3:, :].copy()
    r.flags.writeable = False
    return RybczynskiMatrix(r)


def stolper_samuelson_matrix(economy: Economy) -> np.ndarray:
    """s[i, j] = w_i* / p_j* at constant endowments."""
    rhs = np.zeros((5, 2))
    rhs[:2, :] = np.eye(2)
    sol, _ = _solve(economy, rhs)
    return sol[:3, :]


def reciprocity_check(economy: Economy) -> float:
    """Largest gap in the reciprocity relation dX_j/dV_i = dw_i/dp_j.

    In rates of change this reads X_j*/V_i* = (theta_i/theta_j) * w_i*/p_j*.
    """
    r = rybczynski_matrix(economy).r
    s = stolper_samuelson_matrix(economy)
    fi = economy.income.factors
    gj = economy.income.goods
    scaled = s.T * fi[None, :] / gj[:, None]
    return float(np.abs(r - scaled).max())


@dataclass(frozen=True)
class RelativeOutputEffects:
    values: np.ndarray  # X_1*/V_i* - X_2*/V_i* per factor

    def signs(self) -> dict[str, str]:
        return {f: sign_char(sign(self.values[i])) for i, f in enumerate(FACTORS)}


def relative_output_effects(r: RybczynskiMatrix) -> RelativeOutputEffects:
    return RelativeOutputEffects(r.r[0] - r.r[1])


def relative_output_signs(signs: np.ndarray) -> list[int | None]:
    """Sign of X_1*/V_i* - X_2*/V_i* from a 2x3 sign matrix; None when undetermined.

    Cells may hold None for unknown signs.
    """
    out = []
    for i in range(3):
        top, bottom = signs[0][i], signs[1][i]
        if top is None or bottom is None:
            out.append(None)
        elif top == bottom:
            out.append(0 if top == 0 else None)
        elif top == 0:
            out.append(-bottom)
        elif bottom == 0:
            out.append(top)
        else:
            out.append(top)  # (+) - (-) or (-) - (+)
    return out
