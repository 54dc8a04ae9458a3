"""Reverse-engineered equilibria of the land economy.

A land price path is fixed first (``P_t = p G^(t/sigma)`` for the
fundamental construction, ``P_t = p G^t`` for the bubbly one) and the
young endowment ``e_t^y`` is then chosen so that the household first-order
condition holds at every date.  Everything else (consumption, interest
rates, date-0 prices) follows in closed form.

Stored arrays start at the first period ``t0`` with positive young
endowment; date-0 prices are normalized there.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .economy import (
    CESParams,
    CRRAParams,
    Demography,
    asymptotics,
    log_factor_prices,
    marginal_utilities,
)
from .errors import ConstructionError, DomainError

DEFAULT_HORIZON = 400


class PathKind(str, enum.Enum):
    FUNDAMENTAL = "fundamental"
    BUBBLY = "bubbly"


@dataclass(frozen=True)
class PricePathSpec:
    kind: PathKind
    p: float

    def __post_init__(self):
        object.__setattr__(self, "kind", PathKind(self.kind))
        if not self.p > 0:
            raise DomainError(f"price level p must be positive, got {self.p}")

    def log_price(self, t: np.ndarray, ces: CESParams, demo: Demography) -> np.ndarray:
        growth = demo.log_G / ces.sigma if self.kind is PathKind.FUNDAMENTAL else demo.log_G
        return math.log(self.p) + np.asarray(t, dtype=float) * growth


@dataclass(frozen=True)
class ScenarioConfig:
    ces: CESParams
    pref: CRRAParams
    demo: Demography
    e_o: float
    price: PricePathSpec
    horizon: int = DEFAULT_HORIZON
    t0_override: Optional[int] = None

    def __post_init__(self):
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise DomainError(f"horizon must be an integer >= 1, got {self.horizon}")
        if not self.e_o >= 0:
            raise DomainError(f"old endowment must be nonnegative, got {self.e_o}")
        if self.t0_override is not None and not 0 <= self.t0_override < self.horizon:
            raise DomainError(f"t0_override must lie in [0, horizon), got {self.t0_override}")

    @property
    def land_economy_valid(self) -> bool:
        return self.demo.G > 1 and self.ces.sigma > 1 and not self.ces.cobb_douglas


@dataclass(frozen=True)
class EquilibriumPath:
    """Equilibrium objects for ``t = t0, ..., T_max``.

    ``z[i]`` is old consumption at date ``t[i]`` (the initial old at ``t0``
    included); ``y[i]`` is young consumption of generation ``t[i]``.
    ``e_y`` is the young goods endowment excluding the wage, so the young
    budget reads ``y + P/G^t == e_y + w``.
    """

    t: np.ndarray
    w: np.ndarray
    r: np.ndarray
    P: np.ndarray
    e_y: np.ndarray
    y: np.ndarray
    z: np.ndarray
    R: np.ndarray
    log_q: np.ndarray
    x: np.ndarray
    G: float
    e_o: float
    kind: Optional[PathKind] = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def t0(self) -> int:
        return int(self.t[0])

    @property
    def horizon(self) -> int:
        return int(self.t[-1])

    @property
    def savings(self) -> np.ndarray:
        """Per-capita land holdings in goods, ``P_t / G^t``."""
        return np.exp(np.log(self.P) - self.t * math.log(self.G))

    def index(self, t: int) -> int:
        i = int(t) - self.t0
        if not 0 <= i < len(self.t):
            raise IndexError(f"period {t} outside [{self.t0}, {self.horizon}]")
        return i


# ---------------------------------------------------------------------------
# Positivity bounds
# ---------------------------------------------------------------------------


def eo_bound(cfg: ScenarioConfig) -> float:
    """Smallest old endowment for which the fundamental construction's limit young endowment is positive."""
    asy = asymptotics(cfg.ces, cfg.demo)
    b, g = cfg.pref.beta, cfg.pref.gamma
    return asy.w * (b * asy.G_r * (1.0 + asy.r / cfg.price.p)) ** (1.0 / g)


def p_bound(cfg: ScenarioConfig) -> float:
    """Price level above which the bubbly construction's limit young endowment is positive."""
    asy = asymptotics(cfg.ces, cfg.demo)
    b, g, G = cfg.pref.beta, cfg.pref.gamma, cfg.demo.G
    return (asy.w - (b * G) ** (-1.0 / g) * cfg.e_o) / (1.0 + (b * G ** (1.0 - g)) ** (-1.0 / g))


def limit_young_endowment(cfg: ScenarioConfig) -> float:
    """Limit of the reverse-engineered ``e_t^y`` (wage excluded)."""
    asy = asymptotics(cfg.ces, cfg.demo)
    b, g, G, p = cfg.pref.beta, cfg.pref.gamma, cfg.demo.G, cfg.price.p
    if cfg.price.kind is PathKind.FUNDAMENTAL:
        return cfg.e_o * (b * asy.G_r * (1.0 + asy.r / p)) ** (-1.0 / g) - asy.w
    return (cfg.e_o + G * p) * (b * G) ** (-1.0 / g) - asy.w + p


def _check_bound(cfg: ScenarioConfig) -> None:
    if not cfg.land_economy_valid:
        raise ConstructionError(
            f"land-economy construction needs G > 1 and sigma > 1 (G={cfg.demo.G}, sigma={cfg.ces.sigma})",
            bound_name="regime",
            bound_value=1.0,
            value=min(cfg.demo.G, cfg.ces.sigma),
        )
    if cfg.price.kind is PathKind.FUNDAMENTAL:
        bound = eo_bound(cfg)
        if not cfg.e_o > bound:
            raise ConstructionError(
                f"eo bound violated: need e_o > {bound:.6g}, got e_o = {cfg.e_o:.6g}",
                bound_name="eo",
                bound_value=bound,
                value=cfg.e_o,
            )
    else:
        bound = p_bound(cfg)
        if not cfg.price.p > bound:
            raise ConstructionError(
                f"p bound violated: need p > {bound:.6g}, got p = {cfg.price.p:.6g}",
                bound_name="p",
                bound_value=bound,
                value=cfg.price.p,
            )


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


class _RawPath(NamedTuple):
    t: np.ndarray
    w: np.ndarray
    r: np.ndarray
    P: np.ndarray
    e_y: np.ndarray
    y: np.ndarray
    z: np.ndarray
    R: np.ndarray


def _construct(cfg: ScenarioConfig, start: int) -> _RawPath:
    """Closed-form objects on ``[start, horizon]`` (one look-ahead period used internally)."""
    demo, pref = cfg.demo, cfg.pref
    ts = np.arange(start, cfg.horizon + 2, dtype=float)
    log_w, log_r = log_factor_prices(ts, cfg.ces, demo)
    log_P = cfg.price.log_price(ts, cfg.ces, demo)
    log_N = ts * demo.log_G

    log_payoff = np.logaddexp(log_P, log_r)  # log(P_t + r_t)
    R = np.exp(log_payoff[1:] - log_P[:-1])
    z_next = cfg.e_o + np.exp(log_payoff[1:] - log_N[:-1])
    y = z_next * (pref.beta * R) ** (-1.0 / pref.gamma)
    w = np.exp(log_w[:-1])
    e_y = y + np.exp(log_P[:-1] - log_N[:-1]) - w
    # old consumption at each stored date: z_t = e_o + (P_t + r_t) / G^(t-1)
    z = cfg.e_o + np.exp(log_payoff[:-1] - log_N[:-1] + demo.log_G)
    return _RawPath(ts[:-1], w, np.exp(log_r[:-1]), np.exp(log_P[:-1]), e_y, y, z, R)


def find_t0(cfg: ScenarioConfig) -> int:
    """First period from which the reverse-engineered young endowment stays positive.

    The scan covers the stored horizon; the analytic limit of ``e_t^y`` is
    required to be positive as well.
    """
    _check_bound(cfg)
    limit = limit_young_endowment(cfg)
    if not limit > 0:  # only reachable through rounding at the bound
        raise ConstructionError(
            f"limit young endowment {limit:.6g} is not positive",
            bound_name="eo" if cfg.price.kind is PathKind.FUNDAMENTAL else "p",
            bound_value=0.0,
            value=limit,
        )
    raw = _construct(cfg, 0)
    bad = np.flatnonzero(~(raw.e_y > 0))
    if cfg.t0_override is not None:
        if np.any(bad >= cfg.t0_override):
            first = int(raw.t[bad[bad >= cfg.t0_override][0]])
            raise ConstructionError(
                f"young endowment nonpositive at t={first} after t0_override={cfg.t0_override}",
                bound_name="t0",
                bound_value=float(first),
                value=float(cfg.t0_override),
            )
        return int(cfg.t0_override)
    t0 = 0 if bad.size == 0 else int(bad[-1]) + 1
    if t0 > cfg.horizon - 1:
        raise ConstructionError(
            f"young endowment not yet positive by the horizon {cfg.horizon}; increase the horizon",
            bound_name="horizon",
            bound_value=float(t0),
            value=float(cfg.horizon),
        )
    return t0


def date0_prices(R: np.ndarray) -> np.ndarray:
    """Log date-0 prices ``log q`` from gross rates, normalized to 0 at the first entry.

    Returns an array one longer than ``R``.
    """
    R = np.asarray(R, dtype=float)
    if np.any(R <= 0):
        raise DomainError("gross rates must be positive")
    return np.concatenate(([0.0], -np.cumsum(np.log(R))))


def _build(cfg: ScenarioConfig, kind: PathKind) -> EquilibriumPath:
    if cfg.price.kind is not kind:
        raise ValueError(f"config describes a {cfg.price.kind.value} path, not {kind.value}")
    t0 = find_t0(cfg)
    raw = _construct(cfg, t0)
    return EquilibriumPath(
        t=raw.t,
        w=raw.w,
        r=raw.r,
        P=raw.P,
        e_y=raw.e_y,
        y=raw.y,
        z=raw.z,
        R=raw.R,
        log_q=date0_prices(raw.R)[:-1],
        x=np.exp(-raw.t * cfg.demo.log_G),
        G=cfg.demo.G,
        e_o=cfg.e_o,
        kind=kind,
    )


def build_fundamental(cfg: ScenarioConfig) -> EquilibriumPath:
    """Fundamental equilibrium with ``P_t = p G^(t/sigma)``.

    Requires ``e_o`` above :func:`eo_bound`; raises
    :class:`~olgland.errors.ConstructionError` otherwise.
    """
    return _build(cfg, PathKind.FUNDAMENTAL)


def build_bubbly(cfg: ScenarioConfig) -> EquilibriumPath:
    """Asymptotically bubbly equilibrium with ``P_t = p G^t`` (requires ``p`` above :func:`p_bound`)."""
    return _build(cfg, PathKind.BUBBLY)


def build(cfg: ScenarioConfig) -> EquilibriumPath:
    if cfg.price.kind is PathKind.FUNDAMENTAL:
        return build_fundamental(cfg)
    return build_bubbly(cfg)


# ---------------------------------------------------------------------------
# Checks on a path
# ---------------------------------------------------------------------------


class Residuals(NamedTuple):
    foc: float
    clearing: float


def foc_residuals(path: EquilibriumPath, pref: CRRAParams) -> np.ndarray:
    """Relative Euler residuals ``(-U_1 P_t + U_2 (P_{t+1} + r_{t+1})) / (U_1 P_t)`` for t < T_max."""
    U1, U2 = marginal_utilities(path.y[:-1], path.z[1:], pref)
    return (-U1 * path.P[:-1] + U2 * (path.P[1:] + path.r[1:])) / (U1 * path.P[:-1])


def clearing_residuals(path: EquilibriumPath) -> np.ndarray:
    """Goods-market residuals per date, detrended by ``G^t`` and relative to resources."""
    log_G = math.log(path.G)
    trend = np.exp(-path.t * log_G)
    resources = path.e_y + path.w + path.e_o / path.G + path.r * trend
    uses = path.y + path.z / path.G
    return (uses - resources) / resources


def verify_residuals(path: EquilibriumPath, cfg: ScenarioConfig) -> Residuals:
    """Largest absolute first-order-condition and goods-clearing residuals."""
    return Residuals(
        foc=float(np.max(np.abs(foc_residuals(path, cfg.pref)), initial=0.0)),
        clearing=float(np.max(np.abs(clearing_residuals(path)), initial=0.0)),
    )


def budget_residuals(path: EquilibriumPath) -> Residuals:
    """Young and old budget identities (``foc`` slot holds the young one)."""
    log_G = math.log(path.G)
    young = path.y + path.savings - (path.e_y + path.w)
    old = path.z[1:] - (path.e_o + (path.P[1:] + path.r[1:]) * np.exp(-path.t[:-1] * log_G))
    return Residuals(
        foc=float(np.max(np.abs(young / path.y))),
        clearing=float(np.max(np.abs(old / path.z[1:]), initial=0.0)),
    )


@dataclass(frozen=True)
class FundamentalValue:
    value: float  # (1/q_t) sum_{s=t+1}^T q_s r_s
    tail: float  # q_T P_T / q_t


def fundamental_value(path: EquilibriumPath, t: int, T: int) -> FundamentalValue:
    """Truncated present value of rents after ``t`` plus the terminal-price term.

    ``value + tail`` equals ``P_t`` on an equilibrium path.
    """
    i, j = path.index(t), path.index(T)
    if not i < j:
        raise ValueError(f"need t < T, got t={t}, T={T}")
    rel = path.log_q[i + 1 : j + 1] - path.log_q[i]
    with np.errstate(divide="ignore"):
        terms = np.exp(rel + np.log(path.r[i + 1 : j + 1]))
    value = math.fsum(terms.tolist())
    tail = math.exp(path.log_q[j] - path.log_q[i] + math.log(path.P[j]))
    return FundamentalValue(value=value, tail=tail)


@dataclass(frozen=True)
class DetrendedSeries:
    t: np.ndarray
    price: np.ndarray  # P_t / G^t
    resources: np.ndarray  # (G^t (e_y + w) + G^(t-1) e_o + r_t) / G^t
    dividend: np.ndarray  # r_t / G^t


def detrend(path: EquilibriumPath, demo: Optional[Demography] = None) -> DetrendedSeries:
    """Divide aggregate series by ``a_t = G^t``."""
    G = demo.G if demo is not None else path.G
    trend = np.exp(-path.t * math.log(G))
    dividend = path.r * trend
    return DetrendedSeries(
        t=path.t,
        price=path.P * trend,
        resources=path.e_y + path.w + path.e_o / G + dividend,
        dividend=dividend,
    )
