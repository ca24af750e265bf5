"""Shares, Allen elasticities and economy-wide substitution for the 3x2 model.

Arrays follow a fixed layout everywhere in the package:

* factor axis ``i`` in the order (T, K, L) -- land, capital, labor;
* good axis ``j`` in the order (1, 2) -- exportable, importable;
* ``theta[i, j]`` distributive share, ``lam[i, j]`` allocation share;
* ``sigma[j, i, h]`` Allen partial elasticity of sector ``j``.
"""

from __future__ import annotations

import configparser
import enum
import io
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import Indeterminate, InvalidShares, RatioUndefined

SHARE_TOL = 1e-9
SIGN_TOL = 1e-12


class Factor(enum.IntEnum):
    T = 0
    K = 1
    L = 2


class Good(enum.IntEnum):
    EXPORTABLE = 0
    IMPORTABLE = 1

    @property
    def label(self) -> str:
        return str(self.value + 1)


FACTORS = tuple(f.name for f in Factor)
GOODS = ("1", "2")


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.flags.writeable = False
    return arr


def sign(x: float, tol: float = SIGN_TOL) -> int:
    """Sign with a dead band: values within ``tol`` of zero map to 0."""
    if not np.isfinite(x):
        return 0
    if x > tol:
        return 1
    if x < -tol:
        return -1
    return 0


def sign_char(s: int | None) -> str:
    return {1: "+", -1: "-", 0: "0"}.get(s, "?")


# ---------------------------------------------------------------------------
# share tables


@dataclass(frozen=True)
class DistributiveShares:
    """theta[i, j]: share of factor i in the unit cost of good j."""

    theta: np.ndarray

    def __post_init__(self):
        theta = _frozen(self.theta)
        if theta.shape != (3, 2):
            raise InvalidShares(f"theta must be 3x2, got {theta.shape}")
        if not np.all(np.isfinite(theta)) or np.any(theta <= 0):
            raise InvalidShares("every distributive share must be positive")
        sums = theta.sum(axis=0)
        if np.any(np.abs(sums - 1) > SHARE_TOL):
            raise InvalidShares(f"column sums of theta are {sums}, expected 1")
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_columns(cls, sector1, sector2) -> DistributiveShares:
        return cls(np.column_stack([sector1, sector2]))

    def ratios(self) -> np.ndarray:
        """theta_i1 / theta_i2 for each factor."""
        return self.theta[:, 0] / self.theta[:, 1]


@dataclass(frozen=True)
class IncomeShares:
    """Shares of goods (theta_j) and factors (theta_i) in national income."""

    goods: np.ndarray
    factors: np.ndarray

    def __post_init__(self):
        goods = _frozen(self.goods)
        factors = _frozen(self.factors)
        if goods.shape != (2,) or factors.shape != (3,):
            raise InvalidShares("income shares need 2 goods and 3 factors")
        for name, arr in (("goods", goods), ("factors", factors)):
            if np.any(arr <= 0) or abs(arr.sum() - 1) > SHARE_TOL:
                raise InvalidShares(f"{name} income shares {arr} must be positive and sum to 1")
        object.__setattr__(self, "goods", goods)
        object.__setattr__(self, "factors", factors)

    def factor_ratio(self, i: int, h: int) -> float:
        """theta_ih = theta_i / theta_h."""
        return self.factors[i] / self.factors[h]


@dataclass(frozen=True)
class AllocationShares:
    """lam[i, j]: fraction of the endowment of factor i employed in sector j."""

    lam: np.ndarray

    def __post_init__(self):
        lam = _frozen(self.lam)
        if lam.shape != (3, 2):
            raise InvalidShares(f"lambda must be 3x2, got {lam.shape}")
        if np.any(lam < 0) or np.any(np.abs(lam.sum(axis=1) - 1) > SHARE_TOL):
            raise InvalidShares(f"allocation rows must be nonnegative and sum to 1: {lam}")
        object.__setattr__(self, "lam", lam)


@dataclass(frozen=True)
class AllenMatrix:
    """sigma[j, i, h]: Allen partial elasticities of substitution per sector.

    Homogeneity and concavity depend on the distributive shares, so they
    are checked by :meth:`validate` (called from :class:`Economy`).
    """

    sigma: np.ndarray

    def __post_init__(self):
        sigma = _frozen(self.sigma)
        if sigma.shape != (2, 3, 3):
            raise InvalidShares(f"sigma must be 2x3x3, got {sigma.shape}")
        if not np.all(np.isfinite(sigma)):
            raise InvalidShares("sigma has non-finite entries")
        if np.any(np.abs(sigma - sigma.transpose(0, 2, 1)) > SHARE_TOL * (1 + np.abs(sigma))):
            raise InvalidShares("Allen elasticities must be symmetric in (i, h)")
        object.__setattr__(self, "sigma", sigma)

    def validate(self, distributive: DistributiveShares) -> None:
        theta = distributive.theta
        for j in range(2):
            s = self.sigma[j]
            resid = s @ theta[:, j]
            if np.any(np.abs(resid) > SHARE_TOL * max(1.0, np.abs(s).max())):
                raise InvalidShares(f"sector {j + 1}: sum_h theta_hj sigma_ih != 0 ({resid})")
            for i in range(3):
                # a factor whose whole row is zero is used in fixed proportions
                if s[i, i] >= 0 and np.any(s[i] != 0):
                    raise InvalidShares(f"sector {j + 1}: own elasticity of {FACTORS[i]} must be negative")
            curv = np.outer(theta[:, j], theta[:, j]) * s
            top = np.linalg.eigvalsh(curv).max()
            if top > SHARE_TOL * max(1.0, np.abs(curv).max()):
                raise InvalidShares(f"sector {j + 1}: cost function not concave (eigenvalue {top:g})")

    @classmethod
    def from_offdiagonal(cls, distributive: DistributiveShares, pairs1, pairs2) -> AllenMatrix:
        """Complete sigma from the cross elasticities (TK, TL, KL) of each sector.

        Own elasticities follow from homogeneity: sigma_ii = -sum_{h!=i} theta_h sigma_ih / theta_i.
        """
        theta = distributive.theta
        sigma = np.zeros((2, 3, 3))
        for j, (tk, tl, kl) in enumerate((pairs1, pairs2)):
            s = np.zeros((3, 3))
            s[0, 1] = s[1, 0] = tk
            s[0, 2] = s[2, 0] = tl
            s[1, 2] = s[2, 1] = kl
            for i in range(3):
                s[i, i] = -(s[i] @ theta[:, j]) / theta[i, j]
            sigma[j] = s
        return cls(sigma)


def derive_allocation(distributive: DistributiveShares, income_goods) -> tuple[IncomeShares, AllocationShares]:
    """Factor income shares and allocation shares implied by theta and theta_j.

    lam_ij = (theta_j / theta_i) * theta_ij with theta_i = sum_j theta_j theta_ij.
    """
    goods = np.asarray(income_goods, dtype=float)
    if goods.shape != (2,) or np.any(goods <= 0) or abs(goods.sum() - 1) > SHARE_TOL:
        raise InvalidShares(f"goods income shares {goods} must be positive and sum to 1")
    theta = distributive.theta
    factors = theta @ goods
    lam = theta * goods[None, :] / factors[:, None]
    return IncomeShares(goods, factors), AllocationShares(lam)


@dataclass(frozen=True)
class Economy:
    """One 3x2 economy at a point in time."""

    distributive: DistributiveShares
    income: IncomeShares
    allocation: AllocationShares
    allen: AllenMatrix

    def __post_init__(self):
        theta = self.distributive.theta
        implied = theta @ self.income.goods
        if np.any(np.abs(implied - self.income.factors) > SHARE_TOL):
            raise InvalidShares("factor income shares inconsistent with theta and goods shares")
        lam = theta * self.income.goods[None, :] / self.income.factors[:, None]
        if np.any(np.abs(lam - self.allocation.lam) > SHARE_TOL):
            raise InvalidShares("allocation shares inconsistent with theta and income shares")
        self.allen.validate(self.distributive)

    @classmethod
    def build(cls, theta, goods_share, sigma) -> Economy:
        dist = theta if isinstance(theta, DistributiveShares) else DistributiveShares(theta)
        income, alloc = derive_allocation(dist, goods_share)
        allen = sigma if isinstance(sigma, AllenMatrix) else AllenMatrix(sigma)
        return cls(dist, income, alloc, allen)

    @property
    def theta(self) -> np.ndarray:
        return self.distributive.theta

    @property
    def lam(self) -> np.ndarray:
        return self.allocation.lam

    @property
    def sigma(self) -> np.ndarray:
        return self.allen.sigma


# ---------------------------------------------------------------------------
# factor intensity


@dataclass(frozen=True)
class IntensityRanking:
    order: tuple[Factor, ...]  # descending theta_i1 / theta_i2
    ratios: np.ndarray
    lambda_order: tuple[Factor, ...]  # descending lam_i1
    middle_intensive_in_1: bool  # theta_m1 > theta_m2 for the middle factor m

    @property
    def middle_factor(self) -> Factor:
        return self.order[1]

    @property
    def extreme_factors(self) -> tuple[Factor, Factor]:
        return self.order[0], self.order[2]

    @property
    def is_canonical(self) -> bool:
        """Sector 1 land intensive, sector 2 capital intensive, labor in the middle."""
        return self.order == (Factor.T, Factor.L, Factor.K)


def intensity_ranking(distributive: DistributiveShares, income_goods=(0.5, 0.5)) -> IntensityRanking:
    """Rank factors by theta_i1/theta_i2; ties raise :class:`Indeterminate`.

    The allocation ordering is reported alongside; it always coincides with
    the ratio ordering because lam_i1 is increasing in theta_i1/theta_i2.
    """
    theta = distributive.theta
    ratios = distributive.ratios()
    for a, b in combinations(range(3), 2):
        if abs(ratios[a] - ratios[b]) <= SIGN_TOL:
            raise Indeterminate(f"intensity ratios of {FACTORS[a]} and {FACTORS[b]} tie")
    order = tuple(Factor(i) for i in np.argsort(-ratios))
    _, alloc = derive_allocation(distributive, income_goods)
    lam_order = tuple(Factor(i) for i in np.argsort(-alloc.lam[:, 0]))
    m = order[1]
    if abs(theta[m, 0] - theta[m, 1]) <= SIGN_TOL:
        raise Indeterminate(f"middle factor {m.name} has equal shares in both sectors")
    return IntensityRanking(order, _frozen(ratios), lam_order, bool(theta[m, 0] > theta[m, 1]))


# ---------------------------------------------------------------------------
# substitution


def cost_share_elasticities(economy: Economy) -> np.ndarray:
    """eps[j, i, h] = d log a_ij / d log w_h = theta_hj * sigma^j_ih."""
    theta = economy.theta
    return economy.sigma * theta.T[:, None, :]


def ews_matrix(economy: Economy) -> np.ndarray:
    """g[i, h] = sum_j lam_ij eps^j_ih."""
    eps = cost_share_elasticities(economy)
    return np.einsum("ij,jih->ih", economy.lam, eps)


@dataclass(frozen=True)
class EWSComponents:
    g: np.ndarray

    @property
    def s(self) -> float:
        return float(self.g[Factor.L, Factor.K])

    @property
    def t(self) -> float:
        return float(self.g[Factor.L, Factor.T])

    @property
    def u(self) -> float:
        return float(self.g[Factor.K, Factor.T])


@dataclass(frozen=True)
class EWSRatioVector:
    s_prime: float
    u_prime: float

    @property
    def quadrant(self) -> int | None:
        """Cartesian quadrant of (S', U'); None on an axis."""
        sx, sy = sign(self.s_prime), sign(self.u_prime)
        return {(1, 1): 1, (-1, 1): 2, (-1, -1): 3, (1, -1): 4}.get((sx, sy))

    def __iter__(self):
        yield self.s_prime
        yield self.u_prime


@dataclass(frozen=True)
class EWSReport:
    components: EWSComponents
    ratio: EWSRatioVector
    labels: dict = field(default_factory=dict)

    @property
    def g(self) -> np.ndarray:
        return self.components.g


def ews_labels(g: np.ndarray) -> dict[str, str]:
    labels = {}
    for i, h in combinations(range(3), 2):
        s = sign(g[i, h])
        labels[FACTORS[i] + FACTORS[h]] = {1: "substitutes", -1: "complements", 0: "independent"}[s]
    return labels


def ews(economy: Economy) -> EWSReport:
    """EWS matrix, the ratio vector (S', U') and pairwise substitute/complement labels."""
    g = _frozen(ews_matrix(economy))
    comp = EWSComponents(g)
    if abs(comp.t) <= SIGN_TOL:
        raise RatioUndefined(f"g_LT = {comp.t:g} is zero")
    ratio = EWSRatioVector(comp.s / comp.t, comp.u / comp.t)
    return EWSReport(comp, ratio, ews_labels(g))


# ---------------------------------------------------------------------------
# key-value documents

_PAIRS = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]


def economy_to_text(economy: Economy, extra: dict[str, dict[str, float]] | None = None) -> str:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp["distributive"] = {
        f"theta_{FACTORS[i]}{j + 1}": repr(float(economy.theta[i, j])) for j in range(2) for i in range(3)
    }
    cp["income"] = {f"theta_{j + 1}": repr(float(economy.income.goods[j])) for j in range(2)}
    for j in range(2):
        cp[f"allen.sector{j + 1}"] = {
            f"sigma{j + 1}_{FACTORS[i]}{FACTORS[h]}": repr(float(economy.sigma[j, i, h])) for i, h in _PAIRS
        }
    for name, section in (extra or {}).items():
        cp[name] = {k: repr(float(v)) for k, v in section.items()}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def _read_parser(text: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise InvalidShares(f"malformed economy document: {exc}") from exc
    return cp


def economy_from_text(text: str) -> Economy:
    cp = _read_parser(text)
    try:
        d = cp["distributive"]
        theta = [[float(d[f"theta_{f}{j}"]) for j in (1, 2)] for f in FACTORS]
        inc = cp["income"]
        goods = [float(inc["theta_1"]), float(inc["theta_2"])]
        sigma = np.full((2, 3, 3), np.nan)
        for j in range(2):
            sec = cp[f"allen.sector{j + 1}"]
            for key, value in sec.items():
                pair = key.split("_", 1)[1]
                i, h = FACTORS.index(pair[0]), FACTORS.index(pair[1])
                v = float(value)
                for a, b in ((i, h), (h, i)):
                    if np.isfinite(sigma[j, a, b]) and abs(sigma[j, a, b] - v) > SHARE_TOL:
                        raise InvalidShares(f"sigma{j + 1}_{pair} conflicts with its transpose")
                    sigma[j, a, b] = v
    except KeyError as exc:
        raise InvalidShares(f"missing field {exc}") from exc
    except (ValueError, IndexError) as exc:
        raise InvalidShares(f"bad field: {exc}") from exc
    if np.isnan(sigma).any():
        raise InvalidShares("Allen sections are incomplete")
    return Economy.build(theta, goods, sigma)


def read_sections(text: str) -> dict[str, dict[str, float]]:
    """All sections of a key-value document as floats (used for fixture extras)."""
    cp = _read_parser(text)
    return {name: {k: float(v) for k, v in cp[name].items()} for name in cp.sections()}
