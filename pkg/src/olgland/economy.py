"""Production and preference primitives.

CES technology in labor ``H`` and land ``X``, factor prices along the
population path ``H = G**t, X = 1``, and additively separable CRRA
preferences over young/old consumption.  Growth factors are handled in
log space so that horizons of several hundred periods stay finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, NumericalDiagnosticError, UnsupportedRegimeError

ArrayLike = Union[float, np.ndarray]

# |sigma - 1| (or |gamma - 1|) below this routes to the Cobb-Douglas (log) branch.
BRANCH_GUARD = 1e-9
DEFAULT_RTOL = 1e-10


@dataclass(frozen=True)
class CESParams:
    """CES technology ``A (alpha H^rho + (1-alpha) X^rho)^(1/rho)``, ``rho = 1 - 1/sigma``."""

    A: float
    alpha: float
    sigma: float

    def __post_init__(self):
        if not self.A > 0:
            raise DomainError(f"A must be positive, got {self.A}")
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")

    @property
    def cobb_douglas(self) -> bool:
        return abs(self.sigma - 1.0) < BRANCH_GUARD

    @property
    def rho(self) -> float:
        return 1.0 - 1.0 / self.sigma


@dataclass(frozen=True)
class CRRAParams:
    """Preferences ``u(y) + beta u(z)`` with relative risk aversion ``gamma``."""

    beta: float
    gamma: float

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")
        if not self.gamma > 0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")

    @property
    def log_utility(self) -> bool:
        return abs(self.gamma - 1.0) < BRANCH_GUARD


@dataclass(frozen=True)
class Demography:
    """Population ``N_t = G**t``."""

    G: float

    def __post_init__(self):
        if not self.G > 0:
            raise DomainError(f"G must be positive, got {self.G}")

    @property
    def log_G(self) -> float:
        return math.log(self.G)

    def population(self, t: ArrayLike) -> ArrayLike:
        return np.exp(np.asarray(t, dtype=float) * self.log_G)


@dataclass(frozen=True)
class FactorPrices:
    w: ArrayLike
    r: ArrayLike


def _require_positive(name: str, x: ArrayLike) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0):
        raise DomainError(f"{name} must be positive")
    return arr


def _scalar_or_array(x: np.ndarray) -> ArrayLike:
    return float(x) if np.ndim(x) == 0 else x


# ---------------------------------------------------------------------------
# Production
# ---------------------------------------------------------------------------


def _log_aggregator(log_H, log_X, ces: CESParams):
    """``log(alpha H^rho + (1-alpha) X^rho)`` without forming the powers."""
    rho = ces.rho
    return np.logaddexp(math.log(ces.alpha) + rho * log_H, math.log1p(-ces.alpha) + rho * log_X)


def log_ces_output(log_H: ArrayLike, log_X: ArrayLike, ces: CESParams) -> ArrayLike:
    log_H = np.asarray(log_H, dtype=float)
    log_X = np.asarray(log_X, dtype=float)
    if ces.cobb_douglas:
        out = math.log(ces.A) + ces.alpha * log_H + (1.0 - ces.alpha) * log_X
    else:
        out = math.log(ces.A) + _log_aggregator(log_H, log_X, ces) / ces.rho
    return _scalar_or_array(out)


def ces_output(H: ArrayLike, X: ArrayLike, ces: CESParams) -> ArrayLike:
    """Output ``F(H, X)`` of the CES technology.

    Homogeneous of degree one and strictly increasing in both inputs.
    ``sigma == 1`` (within ``BRANCH_GUARD``) is the Cobb-Douglas case
    ``A H^alpha X^(1-alpha)``.
    """
    H = _require_positive("H", H)
    X = _require_positive("X", X)
    return _scalar_or_array(np.exp(log_ces_output(np.log(H), np.log(X), ces)))


def log_marginal_products(log_H: ArrayLike, log_X: ArrayLike, ces: CESParams):
    """Return ``(log F_H, log F_X)`` at the given log inputs."""
    log_H = np.asarray(log_H, dtype=float)
    log_X = np.asarray(log_X, dtype=float)
    if ces.cobb_douglas:
        log_F = math.log(ces.A) + ces.alpha * log_H + (1.0 - ces.alpha) * log_X
        log_FH = math.log(ces.alpha) + log_F - log_H
        log_FX = math.log1p(-ces.alpha) + log_F - log_X
    else:
        common = math.log(ces.A) + _log_aggregator(log_H, log_X, ces) / (ces.sigma - 1.0)
        log_FH = common + math.log(ces.alpha) - log_H / ces.sigma
        log_FX = common + math.log1p(-ces.alpha) - log_X / ces.sigma
    return _scalar_or_array(log_FH), _scalar_or_array(log_FX)


def log_factor_prices(t: ArrayLike, ces: CESParams, demo: Demography):
    """``(log w_t, log r_t)`` at ``(H, X) = (G**t, 1)``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("period index must be nonnegative")
    return log_marginal_products(t * demo.log_G, np.zeros_like(t), ces)


def factor_prices_at(t: ArrayLike, ces: CESParams, demo: Demography) -> FactorPrices:
    """Wage and land rent at period ``t`` (scalar or array of periods)."""
    log_w, log_r = log_factor_prices(t, ces, demo)
    return FactorPrices(w=_scalar_or_array(np.exp(log_w)), r=_scalar_or_array(np.exp(log_r)))


@dataclass(frozen=True)
class Asymptotics:
    w: float  # limit wage
    r: float  # rent coefficient: r_t ~ r * G**(t/sigma)
    G_r: float  # asymptotic rent growth factor


def asymptotics(ces: CESParams, demo: Demography) -> Asymptotics:
    """Long-run wage, rent coefficient and rent growth factor for ``sigma > 1, G > 1``."""
    if not ces.sigma > 1 or ces.cobb_douglas:
        raise UnsupportedRegimeError(f"asymptotic formulas need sigma > 1, got {ces.sigma}")
    if not demo.G > 1:
        raise UnsupportedRegimeError(f"asymptotic formulas need G > 1, got {demo.G}")
    s = ces.sigma
    w = ces.A * ces.alpha ** (s / (s - 1.0))
    r = ces.A * ces.alpha ** (1.0 / (s - 1.0)) * (1.0 - ces.alpha)
    return Asymptotics(w=w, r=r, G_r=demo.G ** (1.0 / s))


def labor_share(H: ArrayLike, ces: CESParams) -> ArrayLike:
    """Labor share ``H F_H(H, 1) / F(H, 1)``."""
    H = _require_positive("H", H)
    log_H = np.log(H)
    log_FH, _ = log_marginal_products(log_H, 0.0 * log_H, ces)
    return _scalar_or_array(np.exp(log_H + log_FH - log_ces_output(log_H, 0.0 * log_H, ces)))


def log_price_ratio(h: ArrayLike, ces: CESParams) -> ArrayLike:
    """``log(w / r)`` at input ratio ``H / X = exp(h)``, with ``X = 1``."""
    h = np.asarray(h, dtype=float)
    log_FH, log_FX = log_marginal_products(h, np.zeros_like(h), ces)
    return _scalar_or_array(np.asarray(log_FH) - np.asarray(log_FX))


def sigma_numeric(h: float, ces: CESParams, rel_step: float = 1e-5) -> float:
    """Elasticity of substitution ``-d h / d log(w/r)`` by central differences.

    Raises
    ------
    NumericalDiagnosticError
        If the rounding error of the difference quotient is not small
        relative to the quotient itself.
    """
    if not math.isfinite(h):
        raise DomainError("h must be finite")
    step = rel_step * max(1.0, abs(h))
    f_plus = float(log_price_ratio(h + step, ces))
    f_minus = float(log_price_ratio(h - step, ces))
    actual_step = (h + step) - (h - step)
    slope = (f_plus - f_minus) / actual_step
    rounding = 4 * np.finfo(float).eps * max(abs(f_plus), abs(f_minus), 1.0) / actual_step
    if slope == 0 or rounding > 1e-3 * abs(slope):
        raise NumericalDiagnosticError(
            f"difference quotient {slope:.3e} dominated by rounding (~{rounding:.1e}); increase rel_step"
        )
    return -1.0 / slope


# ---------------------------------------------------------------------------
# Preferences
# ---------------------------------------------------------------------------


def crra(c: ArrayLike, gamma: float) -> ArrayLike:
    """Period utility ``(c^(1-gamma) - 1) / (1 - gamma)``, ``log c`` at ``gamma == 1``.

    The constant shift relative to ``c^(1-gamma)/(1-gamma)`` leaves
    preferences unchanged and keeps levels O(1) as ``gamma -> 1``.
    """
    log_c = np.log(_require_positive("consumption", c))
    if abs(gamma - 1.0) < BRANCH_GUARD:
        return _scalar_or_array(log_c)
    return _scalar_or_array(np.expm1((1.0 - gamma) * log_c) / (1.0 - gamma))


def crra_difference(c_new: ArrayLike, c_old: ArrayLike, gamma: float) -> ArrayLike:
    """``u(c_new) - u(c_old)`` without cancellation when the two are close."""
    c_new = _require_positive("consumption", c_new)
    c_old = _require_positive("consumption", c_old)
    log_ratio = np.log1p((c_new - c_old) / c_old)
    if abs(gamma - 1.0) < BRANCH_GUARD:
        return _scalar_or_array(log_ratio)
    k = 1.0 - gamma
    return _scalar_or_array(c_old**k * np.expm1(k * log_ratio) / k)


def crra_inverse(u: ArrayLike, gamma: float) -> ArrayLike:
    """Consumption delivering period utility ``u``; ``nan`` where none exists."""
    u = np.asarray(u, dtype=float)
    if abs(gamma - 1.0) < BRANCH_GUARD:
        return _scalar_or_array(np.exp(u))
    k = 1.0 - gamma
    base = k * u
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(base > -1.0, np.exp(np.log1p(np.maximum(base, -1.0)) / k), np.nan)
    return _scalar_or_array(out)


def lifetime_utility(y: ArrayLike, z: ArrayLike, pref: CRRAParams) -> ArrayLike:
    return _scalar_or_array(np.asarray(crra(y, pref.gamma)) + pref.beta * np.asarray(crra(z, pref.gamma)))


def marginal_utilities(y: ArrayLike, z: ArrayLike, pref: CRRAParams):
    """``(U_1, U_2)`` for ``U = u(y) + beta u(z)``."""
    y = _require_positive("y", y)
    z = _require_positive("z", z)
    return _scalar_or_array(y ** -pref.gamma), _scalar_or_array(pref.beta * z ** -pref.gamma)


def mrs(y: ArrayLike, z: ArrayLike, pref: CRRAParams) -> ArrayLike:
    """Gross rate ``U_1 / U_2 = (1/beta) (y/z)^(-gamma)``."""
    y = _require_positive("y", y)
    z = _require_positive("z", z)
    return _scalar_or_array((y / z) ** -pref.gamma / pref.beta)


def indifference_elasticity(y: ArrayLike, z: ArrayLike, pref: CRRAParams) -> ArrayLike:
    """Curvature ``-y phi''(y) / phi'(y)`` of the indifference curve through ``(y, z)``.

    For separable CRRA this is ``gamma (1 + y m / z)`` with ``m`` the MRS.
    """
    m = np.asarray(mrs(y, z, pref))
    return _scalar_or_array(pref.gamma * (1.0 + np.asarray(y) * m / np.asarray(z)))


def indifference_curve(y: ArrayLike, level: float, pref: CRRAParams) -> ArrayLike:
    """Old consumption ``phi(y)`` with ``U(y, phi(y)) = level``; ``nan`` off the orthant."""
    u_y = np.asarray(crra(y, pref.gamma))
    return crra_inverse((level - u_y) / pref.beta, pref.gamma)
