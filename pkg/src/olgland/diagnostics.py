"""Bubble, Cass-criterion and threshold diagnostics for equilibrium paths.

Infinite sums are judged from a finite window: the trailing half of the
stored horizon.  A series is called convergent only when its terms decay
geometrically at a stable rate, divergent when they grow or stay bounded
away from zero, and inconclusive otherwise (e.g. harmonic-type decay).
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from .economy import CRRAParams, asymptotics, indifference_curve, indifference_elasticity, lifetime_utility, mrs
from .equilibrium import EquilibriumPath, PathKind, ScenarioConfig, eo_bound, limit_young_endowment, p_bound
from .errors import DomainError

RATIO_MARGIN = 1e-3
LOWER_BOUND_EPS = 1e-8
MIN_TERMS = 32
# late-window log-slope must be at least this fraction of the early-window one
SLOPE_STABILITY = 0.9


class Verdict(str, enum.Enum):
    CONVERGENT = "convergent"
    DIVERGENT = "divergent"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SeriesClassification:
    verdict: Verdict
    partial_sum: float
    tail_ratio: float
    evidence_window: Tuple[int, int]  # [start, end) indices into the term array

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict.value
        d["evidence_window"] = list(self.evidence_window)
        return d


def _slope(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.polyfit(x, y, 1)[0])


def classify_log_series(log_terms: np.ndarray, margin: float = RATIO_MARGIN, eps: float = LOWER_BOUND_EPS) -> SeriesClassification:
    """Classify ``sum exp(log_terms)``; ``-inf`` entries are zero terms."""
    log_terms = np.asarray(log_terms, dtype=float)
    n = len(log_terms)
    if n < MIN_TERMS:
        raise DomainError(f"need at least {MIN_TERMS} terms, got {n}")
    if np.any(np.isnan(log_terms)) or np.any(log_terms == np.inf):
        raise DomainError("terms must be finite and nonnegative")
    partial = float(np.exp(logsumexp(log_terms))) if np.any(np.isfinite(log_terms)) else 0.0
    start = n // 2
    window = (start, n)
    tail = log_terms[start:]
    idx = np.arange(start, n, dtype=float)

    positive = np.isfinite(tail)
    if not positive.any():
        return SeriesClassification(Verdict.CONVERGENT, partial, 0.0, window)
    if positive.sum() < 8:
        return SeriesClassification(Verdict.INCONCLUSIVE, partial, float("nan"), window)

    x, y = idx[positive], tail[positive]
    slope = _slope(x, y)
    ratio = math.exp(slope)
    half = len(x) // 2
    early, late = _slope(x[:half], y[:half]), _slope(x[half:], y[half:])

    # zeros only after the last positive term are underflow of a decaying tail
    k = int(positive.sum())
    contiguous = bool(positive[:k].all())
    geometric = late < 0 and early < 0 and late / early >= SLOPE_STABILITY and contiguous
    if ratio < 1 - margin and geometric:
        verdict = Verdict.CONVERGENT
    elif ratio >= 1 + margin:
        verdict = Verdict.DIVERGENT
    elif positive.all() and float(np.min(tail)) >= math.log(eps) and ratio >= 1 - margin / 10 and late >= -margin / 10:
        # no measurable decay and terms bounded away from zero
        verdict = Verdict.DIVERGENT
    else:
        verdict = Verdict.INCONCLUSIVE
    return SeriesClassification(verdict, partial, ratio, window)


def classify_series(terms: np.ndarray, margin: float = RATIO_MARGIN, eps: float = LOWER_BOUND_EPS) -> SeriesClassification:
    """Classify the infinite sum whose leading terms are ``terms``.

    Parameters
    ----------
    terms : array of nonnegative floats, length >= 32
    margin : geometric-ratio margin around 1
    eps : lower bound below which terms do not count as bounded away from zero
    """
    terms = np.asarray(terms, dtype=float)
    if np.any(terms < 0):
        raise DomainError("series terms must be nonnegative")
    with np.errstate(divide="ignore"):
        return classify_log_series(np.log(terms), margin, eps)


def classify_bubble(path: EquilibriumPath) -> SeriesClassification:
    """Dividend-price series ``sum r_t / P_t``: convergent means a bubble."""
    if np.any(path.P <= 0):
        raise DomainError("asset price must be positive")
    with np.errstate(divide="ignore"):
        return classify_log_series(np.log(path.r) - np.log(path.P))


def cass_check(path: EquilibriumPath) -> SeriesClassification:
    """Cass series ``sum 1 / (q_t G^t)``: divergent means the criterion holds."""
    return classify_log_series(-path.log_q - path.t * math.log(path.G))


def asymptotically_bubbly_check(path: EquilibriumPath, bubble: Optional[SeriesClassification] = None, eps: float = LOWER_BOUND_EPS):
    """Return ``(flag, tail infimum of P_t/G^t)``.

    The flag requires a detected bubble, a trailing-window minimum of the
    detrended price above ``eps``, and no geometric decay of that price.
    """
    bubble = bubble if bubble is not None else classify_bubble(path)
    log_detrended = np.log(path.P) - path.t * math.log(path.G)
    start = len(path.t) // 2
    tail_inf = float(np.exp(np.min(log_detrended[start:])))
    decaying = classify_log_series(log_detrended).verdict is Verdict.CONVERGENT
    flag = bubble.verdict is Verdict.CONVERGENT and tail_inf > eps and not decaying
    return flag, tail_inf


# ---------------------------------------------------------------------------
# Threshold checks
# ---------------------------------------------------------------------------


def natural_rate(young_resources: float, e_o: float, pref: CRRAParams) -> float:
    """MRS at ``(e^y + w, e^o)``; zero when the old have no endowment."""
    if e_o == 0:
        return 0.0
    return float(mrs(young_resources, e_o, pref))


@dataclass(frozen=True)
class NecessityCheck:
    R: float
    G_d: float
    G: float
    holds: bool


def necessity_check(cfg: ScenarioConfig) -> NecessityCheck:
    """Is the natural rate below rent growth, itself below population growth?"""
    asy = asymptotics(cfg.ces, cfg.demo)
    R = natural_rate(limit_young_endowment(cfg) + asy.w, cfg.e_o, cfg.pref)
    G = cfg.demo.G
    return NecessityCheck(R=R, G_d=asy.G_r, G=G, holds=R < asy.G_r < G)


@dataclass(frozen=True)
class ConstructionBounds:
    eo_bound: float
    p_bound: float
    necessity2_bound: float
    p_star: float
    eo_satisfied: bool
    p_satisfied: bool
    necessity2_satisfied: bool
    fundamental_efficient: bool  # p <= p_star: long-run rate of the fundamental path at least G


def construction_bounds(cfg: ScenarioConfig) -> ConstructionBounds:
    asy = asymptotics(cfg.ces, cfg.demo)
    b, g, G, s = cfg.pref.beta, cfg.pref.gamma, cfg.demo.G, cfg.ces.sigma
    p, e_o = cfg.price.p, cfg.e_o
    denom = 1.0 + (b * G ** (1.0 - g)) ** (-1.0 / g)
    nec2 = ((b * G ** (1.0 / s)) ** (-1.0 / g) - (b * G) ** (-1.0 / g)) / denom * e_o
    p_star = asy.r / (G ** (1.0 - 1.0 / s) - 1.0)
    eo_b, p_b = eo_bound(cfg), p_bound(cfg)
    return ConstructionBounds(
        eo_bound=eo_b,
        p_bound=p_b,
        necessity2_bound=nec2,
        p_star=p_star,
        eo_satisfied=e_o > eo_b,
        p_satisfied=p > p_b,
        necessity2_satisfied=p > nec2,
        fundamental_efficient=p <= p_star,
    )


def pv_endowment(path: EquilibriumPath) -> SeriesClassification:
    """Present value of aggregate resources ``sum q_t (G^t (e_y+w) + G^(t-1) e_o + r_t)``."""
    log_G = math.log(path.G)
    with np.errstate(divide="ignore"):
        log_agg = np.logaddexp(
            path.t * log_G + np.log(path.e_y + path.w + path.e_o / path.G),
            np.log(path.r),
        )
    return classify_log_series(path.log_q + log_agg)


@dataclass(frozen=True)
class MuBound:
    mu: float
    min_elasticity: float
    degenerate: bool


def mu_bound(path: EquilibriumPath, pref: CRRAParams, width: float = 0.5, n_grid: int = 21, floor: float = 1e-8) -> MuBound:
    """Uniform lower bound on indifference-curve curvature near the allocation.

    For each generation the indifference curve through ``(y_t, z_{t+1})`` is
    sampled at ``y in [(1-width) y_t, (1+width) y_t]``; ``mu`` is half the
    smallest curvature found (shaded by 1e-9 so the strict inequality holds).
    ``degenerate`` flags consumption within ``floor`` of zero on the window.
    """
    y, z_next = path.y[:-1], path.z[1:]
    if len(y) == 0:
        raise DomainError("path too short for a consumption window")
    degenerate = bool(np.min(y) * (1 - width) < floor or np.min(z_next) < floor)
    scale = np.linspace(1 - width, 1 + width, n_grid)
    ys = np.maximum(y[:, None] * scale[None, :], np.finfo(float).tiny)
    level = lifetime_utility(y, z_next, pref)
    zs = indifference_curve(ys, np.asarray(level)[:, None], pref)
    ok = np.isfinite(zs) & (zs > floor)
    if not ok.all():
        degenerate = True
    if not ok.any():
        return MuBound(mu=0.0, min_elasticity=0.0, degenerate=True)
    elasticity = indifference_elasticity(ys[ok], zs[ok], pref)
    inf = float(np.min(elasticity))
    return MuBound(mu=0.5 * inf * (1 - 1e-9), min_elasticity=inf, degenerate=degenerate)


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiagnosticsReport:
    bubble: SeriesClassification
    cass: SeriesClassification
    asymptotically_bubbly: bool
    detrended_price_inf: float
    natural_rate: float
    rent_growth: float
    growth: float
    necessity_holds: bool
    thresholds: ConstructionBounds
    pv_endowment: SeriesClassification
    mu: float
    mu_degenerate: bool

    @property
    def has_bubble(self) -> Optional[bool]:
        """``None`` when the dividend-price series is inconclusive."""
        return {Verdict.CONVERGENT: True, Verdict.DIVERGENT: False}.get(self.bubble.verdict)

    @property
    def cass_holds(self) -> Optional[bool]:
        return {Verdict.DIVERGENT: True, Verdict.CONVERGENT: False}.get(self.cass.verdict)

    @property
    def efficiency_evidence(self) -> bool:
        """Cass criterion together with a nondegenerate curvature bound ``mu > 0``."""
        return bool(self.cass_holds) and self.mu > 0 and not self.mu_degenerate

    def to_dict(self) -> dict:
        return {
            "bubble": self.bubble.to_dict(),
            "has_bubble": self.has_bubble,
            "cass": self.cass.to_dict(),
            "cass_holds": self.cass_holds,
            "asymptotically_bubbly": self.asymptotically_bubbly,
            "detrended_price_inf": self.detrended_price_inf,
            "natural_rate": self.natural_rate,
            "rent_growth": self.rent_growth,
            "growth": self.growth,
            "necessity_holds": self.necessity_holds,
            "thresholds": asdict(self.thresholds),
            "pv_endowment": self.pv_endowment.to_dict(),
            "pv_endowment_finite": self.pv_endowment.verdict is Verdict.CONVERGENT,
            "mu": self.mu,
            "mu_degenerate": self.mu_degenerate,
            "efficiency_evidence": self.efficiency_evidence,
        }


def diagnose(path: EquilibriumPath, cfg: ScenarioConfig) -> DiagnosticsReport:
    bubble = classify_bubble(path)
    flag, tail_inf = asymptotically_bubbly_check(path, bubble)
    nec = necessity_check(cfg)
    mu = mu_bound(path, cfg.pref)
    return DiagnosticsReport(
        bubble=bubble,
        cass=cass_check(path),
        asymptotically_bubbly=flag,
        detrended_price_inf=tail_inf,
        natural_rate=nec.R,
        rent_growth=nec.G_d,
        growth=nec.G,
        necessity_holds=nec.holds,
        thresholds=construction_bounds(cfg),
        pv_endowment=pv_endowment(path),
        mu=mu.mu,
        mu_degenerate=mu.degenerate,
    )
