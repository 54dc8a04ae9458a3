"""Scenario configuration files.

INI-style text with sections ``[production]`` (A, alpha, sigma),
``[preferences]`` (beta, gamma), ``[demography]`` (G), ``[scenario]``
(e_o, p, kind, horizon, optional t0) and an optional ``[sweep]`` whose
keys are parameter names mapped to comma-separated value lists.
"""

from __future__ import annotations

import configparser
import io
import itertools
from pathlib import Path
from typing import Dict, Iterator, List, Tuple, Union

from .economy import CESParams, CRRAParams, Demography
from .equilibrium import DEFAULT_HORIZON, PathKind, PricePathSpec, ScenarioConfig

SWEEPABLE = ("A", "alpha", "sigma", "beta", "gamma", "G", "e_o", "p", "kind", "horizon")


class ConfigError(ValueError):
    pass


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keys are case-sensitive symbols (A, G)
    return cp


def _get(cp, section: str, key: str, cast=float, default=None):
    try:
        raw = cp.get(section, key)
    except (configparser.NoSectionError, configparser.NoOptionError):
        if default is not None:
            return default
        raise ConfigError(f"missing [{section}] {key}") from None
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a valid {cast.__name__}") from None


def _from_parser(cp) -> ScenarioConfig:
    t0 = cp.get("scenario", "t0", fallback=None)
    try:
        return ScenarioConfig(
            ces=CESParams(_get(cp, "production", "A"), _get(cp, "production", "alpha"), _get(cp, "production", "sigma")),
            pref=CRRAParams(_get(cp, "preferences", "beta"), _get(cp, "preferences", "gamma")),
            demo=Demography(_get(cp, "demography", "G")),
            e_o=_get(cp, "scenario", "e_o"),
            price=PricePathSpec(_get(cp, "scenario", "kind", str).strip().lower(), _get(cp, "scenario", "p")),
            horizon=_get(cp, "scenario", "horizon", int, DEFAULT_HORIZON),
            t0_override=None if t0 in (None, "") else int(t0),
        )
    except ConfigError:
        raise
    except ValueError as exc:  # DomainError and bad enum values
        raise ConfigError(str(exc)) from None


def _read(text: str):
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    return cp


def parse_config(text: str) -> ScenarioConfig:
    return _from_parser(_read(text))


def parse_sweep(text: str) -> Dict[str, List]:
    cp = _read(text)
    if not cp.has_section("sweep"):
        return {}
    grid = {}
    for key, raw in cp.items("sweep"):
        if key not in SWEEPABLE:
            raise ConfigError(f"[sweep] {key} is not a sweepable parameter {SWEEPABLE}")
        values = [v.strip() for v in raw.split(",") if v.strip()]
        cast = str if key == "kind" else int if key == "horizon" else float
        try:
            grid[key] = [cast(v) for v in values]
        except ValueError:
            raise ConfigError(f"[sweep] {key} has a non-numeric entry: {raw!r}") from None
    return grid


def load_config(path: Union[str, Path]) -> Tuple[ScenarioConfig, Dict[str, List]]:
    text = Path(path).read_text()
    return parse_config(text), parse_sweep(text)


def dump_config(cfg: ScenarioConfig) -> str:
    """INI text that :func:`parse_config` maps back to an equal config."""
    cp = _parser()
    cp["production"] = {"A": repr(cfg.ces.A), "alpha": repr(cfg.ces.alpha), "sigma": repr(cfg.ces.sigma)}
    cp["preferences"] = {"beta": repr(cfg.pref.beta), "gamma": repr(cfg.pref.gamma)}
    cp["demography"] = {"G": repr(cfg.demo.G)}
    scenario = {
        "e_o": repr(cfg.e_o),
        "p": repr(cfg.price.p),
        "kind": cfg.price.kind.value,
        "horizon": str(cfg.horizon),
    }
    if cfg.t0_override is not None:
        scenario["t0"] = str(cfg.t0_override)
    cp["scenario"] = scenario
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def config_to_dict(cfg: ScenarioConfig) -> dict:
    return {
        "A": cfg.ces.A,
        "alpha": cfg.ces.alpha,
        "sigma": cfg.ces.sigma,
        "beta": cfg.pref.beta,
        "gamma": cfg.pref.gamma,
        "G": cfg.demo.G,
        "e_o": cfg.e_o,
        "p": cfg.price.p,
        "kind": cfg.price.kind.value,
        "horizon": cfg.horizon,
        "t0": cfg.t0_override,
    }


def with_params(cfg: ScenarioConfig, **params) -> ScenarioConfig:
    """Copy of ``cfg`` with the named flat parameters replaced."""
    flat = config_to_dict(cfg)
    unknown = set(params) - set(flat)
    if unknown:
        raise ConfigError(f"unknown parameters {sorted(unknown)}")
    flat.update(params)
    try:
        return ScenarioConfig(
            ces=CESParams(flat["A"], flat["alpha"], flat["sigma"]),
            pref=CRRAParams(flat["beta"], flat["gamma"]),
            demo=Demography(flat["G"]),
            e_o=flat["e_o"],
            price=PricePathSpec(flat["kind"], flat["p"]),
            horizon=flat["horizon"],
            t0_override=flat["t0"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def sweep_points(grid: Dict[str, List]) -> Iterator[Dict]:
    """Cartesian product of the grid in key order; nothing for an empty grid."""
    if not grid or any(len(v) == 0 for v in grid.values()):
        return
    keys = list(grid)
    for combo in itertools.product(*(grid[k] for k in keys)):
        yield dict(zip(keys, combo))


def _preset(p: float, kind: PathKind) -> ScenarioConfig:
    return ScenarioConfig(
        ces=CESParams(A=1.0, alpha=0.5, sigma=1.5),
        pref=CRRAParams(beta=1.0, gamma=1.0),
        demo=Demography(G=1.2),
        e_o=1.0,
        price=PricePathSpec(kind, p),
    )


PRESETS = {
    "fig1": _preset(3.0, PathKind.FUNDAMENTAL),
    "fig2": _preset(0.5, PathKind.BUBBLY),
}


def preset(name: str) -> ScenarioConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


__all__ = [
    "ConfigError",
    "PRESETS",
    "config_to_dict",
    "dump_config",
    "load_config",
    "parse_config",
    "parse_sweep",
    "preset",
    "sweep_points",
    "with_params",
]
