"""Pareto-improvement oracle: tax each young ``eps`` from ``T_start`` on and
hand ``G * eps`` to each contemporaneous old.

Utility changes are exact (not linearized).  Generation ``t0 - 1`` denotes
the initial old, who value only old-age consumption.  The evaluated
generations run to ``horizon - 1``; the last of them counts toward
"nobody loses" but not toward "somebody gains".
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .economy import CRRAParams, Demography, crra_difference, marginal_utilities
from .equilibrium import EquilibriumPath
from .errors import DomainError, InfeasibleTransferError

DEFAULT_EPS_GRID = (1e-4, 1e-3, 1e-2, 5e-2)
T_STEP = 4
ZERO_TOL = 1e-12


class WelfareVerdict(str, enum.Enum):
    IMPROVEMENT = "improvement"
    NONE_FOUND = "no_improvement_found"


@dataclass(frozen=True)
class TransferScheme:
    epsilon: float
    T_start: int

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise DomainError(f"epsilon must be nonnegative, got {self.epsilon}")


@dataclass(frozen=True)
class ImprovementReport:
    scheme: Optional[TransferScheme]
    generations: np.ndarray  # t0-1, t0, ..., horizon-1
    deltas: np.ndarray
    old_at_start_delta: float
    verdict: WelfareVerdict

    @property
    def min_delta(self) -> float:
        return float(np.min(self.deltas))

    def to_dict(self, include_deltas: bool = False) -> dict:
        d = {
            "verdict": self.verdict.value,
            "epsilon": None if self.scheme is None else self.scheme.epsilon,
            "T_start": None if self.scheme is None else self.scheme.T_start,
            "min_delta": self.min_delta if len(self.deltas) else None,
            "max_delta": float(np.max(self.deltas)) if len(self.deltas) else None,
            "old_at_start_delta": self.old_at_start_delta,
            "n_losers": int(np.sum(self.deltas < -ZERO_TOL)),
        }
        if include_deltas:
            d["generations"] = self.generations.tolist()
            d["deltas"] = self.deltas.tolist()
        return d


def first_order_gain(path: EquilibriumPath, t: int, pref: CRRAParams, demo: Optional[Demography] = None) -> float:
    """``d/d eps U(y_t - eps, z_{t+1} + G eps)`` at ``eps = 0``."""
    G = demo.G if demo is not None else path.G
    i = path.index(t)
    if i + 1 >= len(path.t):
        raise IndexError(f"generation {t} has no old age inside the horizon")
    U1, U2 = marginal_utilities(path.y[i], path.z[i + 1], pref)
    return -U1 + G * U2


def transfer_allocation(path: EquilibriumPath, scheme: TransferScheme, G: float):
    """Young and old consumption per date after the transfer."""
    if scheme.T_start < path.t0:
        raise DomainError(f"T_start={scheme.T_start} precedes t0={path.t0}")
    taxed = path.t >= scheme.T_start
    y = path.y - scheme.epsilon * taxed
    z = path.z + G * scheme.epsilon * taxed
    bad = np.flatnonzero(y <= 0)
    if bad.size:
        first = int(path.t[bad[0]])
        raise InfeasibleTransferError(
            f"epsilon={scheme.epsilon} exceeds young consumption {path.y[bad[0]]:.6g} at t={first}", period=first
        )
    return y, z


def apply_transfer(path: EquilibriumPath, scheme: TransferScheme, pref: CRRAParams, demo: Optional[Demography] = None) -> ImprovementReport:
    """Exact per-generation utility changes under ``scheme``.

    Raises
    ------
    InfeasibleTransferError
        If some taxed young would consume a nonpositive amount.
    """
    G = demo.G if demo is not None else path.G
    y, z = transfer_allocation(path, scheme, G)

    initial_old = float(crra_difference(z[0], path.z[0], pref.gamma))
    young = np.asarray(crra_difference(y[:-1], path.y[:-1], pref.gamma))
    old = np.asarray(crra_difference(z[1:], path.z[1:], pref.gamma))
    deltas = np.concatenate(([initial_old], young + pref.beta * old))
    generations = np.arange(path.t0 - 1, path.horizon, dtype=int)

    if scheme.T_start == path.t0:
        old_at_start = initial_old
    else:
        old_at_start = float(deltas[scheme.T_start - 1 - generations[0]]) if scheme.T_start <= path.horizon else 0.0

    nobody_loses = bool(np.all(deltas >= -ZERO_TOL))
    somebody_gains = bool(np.any(deltas[:-1] > ZERO_TOL))
    verdict = WelfareVerdict.IMPROVEMENT if nobody_loses and somebody_gains else WelfareVerdict.NONE_FOUND
    return ImprovementReport(scheme, generations, deltas, old_at_start, verdict)


def resource_gap(path: EquilibriumPath, scheme: TransferScheme, G: Optional[float] = None) -> np.ndarray:
    """Per-date ``(N_t y_t + N_{t-1} z_t) - (resources)`` after the transfer, detrended by ``G^t``."""
    G = G if G is not None else path.G
    y, z = transfer_allocation(path, scheme, G)
    trend = np.exp(-path.t * math.log(G))
    resources = path.e_y + path.w + path.e_o / G + path.r * trend
    return (y + z / G) - resources


def default_schemes(path: EquilibriumPath, eps_grid: Sequence[float] = DEFAULT_EPS_GRID, t_step: int = T_STEP) -> Iterable[TransferScheme]:
    """Grid of schemes with ``eps`` below the smallest young consumption, in grid order."""
    y_min = float(np.min(path.y))
    starts = range(path.t0, path.horizon, t_step)
    for eps, T in itertools.product(eps_grid, starts):
        if 0 < eps < y_min:
            yield TransferScheme(eps, T)


def improvement_search(
    path: EquilibriumPath,
    pref: CRRAParams,
    demo: Optional[Demography] = None,
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    t_step: int = T_STEP,
) -> ImprovementReport:
    """Best scheme on the ``(eps, T_start)`` grid.

    Among schemes that make nobody worse off, picks the one maximizing the
    smallest utility change over all evaluated generations.  Untaxed
    generations contribute zero, so ties are common; they keep the earlier
    grid point (``eps`` ascending, then ``T_start`` ascending).  Returns a
    ``NONE_FOUND`` report with no scheme when nothing qualifies.
    """
    best, best_score = None, -math.inf
    for scheme in default_schemes(path, eps_grid, t_step):
        report = apply_transfer(path, scheme, pref, demo)
        if report.verdict is not WelfareVerdict.IMPROVEMENT:
            continue
        score = report.min_delta
        if score > best_score:
            best, best_score = report, score
    if best is not None:
        return best
    gens = np.arange(path.t0 - 1, path.horizon, dtype=int)
    return ImprovementReport(None, gens, np.zeros(len(gens)), 0.0, WelfareVerdict.NONE_FOUND)
