import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import synthetic_path
from olgland.config import preset, with_params
from olgland.economy import CRRAParams, Demography
from olgland.equilibrium import build
from olgland.errors import DomainError, InfeasibleTransferError
from olgland.welfare import (
    DEFAULT_EPS_GRID,
    TransferScheme,
    WelfareVerdict,
    apply_transfer,
    default_schemes,
    first_order_gain,
    improvement_search,
    resource_gap,
)

LOG = CRRAParams(1.0, 1.0)


def _utility_oracle(c, gamma):
    return math.log(c) if gamma == 1 else (c ** (1 - gamma) - 1) / (1 - gamma)


def _delta_oracle(path, eps, T, pref, G=1.2):
    """Per-generation utility changes by direct evaluation, keyed by generation."""
    out = {}
    first = path.t0
    # initial old
    z0 = path.z[0] + (G * eps if T == first else 0.0)
    out[first - 1] = _utility_oracle(z0, pref.gamma) - _utility_oracle(path.z[0], pref.gamma)
    for i in range(len(path.t) - 1):
        t = int(path.t[i])
        y_new = path.y[i] - (eps if t >= T else 0.0)
        z_new = path.z[i + 1] + (G * eps if t + 1 >= T else 0.0)
        before = _utility_oracle(path.y[i], pref.gamma) + pref.beta * _utility_oracle(path.z[i + 1], pref.gamma)
        after = _utility_oracle(y_new, pref.gamma) + pref.beta * _utility_oracle(z_new, pref.gamma)
        out[t] = after - before
    return out


# --- first-order gain ------------------------------------------------------------


def test_first_order_gain_limit(fig1_path):
    gain = first_order_gain(fig1_path, 399, LOG)
    assert gain == pytest.approx((1.2 - 1.17629) * 1.0, abs=1e-5)
    assert gain == pytest.approx(0.02371, abs=1e-5)
    # and the sign turns positive where R_t drops below G
    gains = np.array([first_order_gain(fig1_path, t, LOG) for t in range(60)])
    np.testing.assert_array_equal(gains > 0, fig1_path.R[:60] < 1.2)


def test_first_order_gain_oracle(fig1_path):
    i = 10
    y, z = fig1_path.y[i], fig1_path.z[i + 1]
    assert first_order_gain(fig1_path, 10, LOG, Demography(1.2)) == pytest.approx(-1 / y + 1.2 / z, rel=1e-14)


def test_first_order_gain_negative_on_bubbly_path(fig2_path):
    gains = np.array([first_order_gain(fig2_path, t, LOG) for t in range(400)])
    assert np.all(gains < 0)


def test_first_order_gain_knife_edge():
    n = 50
    path = synthetic_path(R=1.2, r=0.1, P=np.ones(n), y=np.ones(n), z=np.full(n, 1.2), n=n)
    assert first_order_gain(path, 20, LOG) == pytest.approx(0.0, abs=1e-15)


def test_first_order_gain_outside_horizon(fig1_path):
    with pytest.raises(IndexError):
        first_order_gain(fig1_path, 400, LOG)


# --- apply_transfer --------------------------------------------------------------------


def test_null_transfer(fig1_path):
    rep = apply_transfer(fig1_path, TransferScheme(0.0, 24), LOG)
    assert np.all(rep.deltas == 0.0)
    assert rep.verdict is WelfareVerdict.NONE_FOUND


def test_negative_epsilon_rejected():
    with pytest.raises(DomainError):
        TransferScheme(-0.1, 3)


def test_start_before_t0_rejected(fig1_path):
    path = build(with_params(preset("fig1"), t0=5))
    with pytest.raises(DomainError):
        apply_transfer(path, TransferScheme(0.01, 2), LOG)


def test_infeasible_transfer_names_period(fig1_path):
    eps = float(fig1_path.y[fig1_path.index(30)]) + 1e-9
    with pytest.raises(InfeasibleTransferError) as info:
        apply_transfer(fig1_path, TransferScheme(eps, 24), LOG)
    first_bad = 24 + int(np.argmax(fig1_path.y[24:] <= eps))
    assert info.value.period == first_bad


@pytest.mark.parametrize("eps, T", [(1e-3, 24), (1e-2, 24), (1e-2, 32), (5e-2, 0)])
def test_deltas_match_oracle(fig1_path, eps, T):
    rep = apply_transfer(fig1_path, TransferScheme(eps, T), LOG)
    oracle = _delta_oracle(fig1_path, eps, T, LOG)
    assert list(rep.generations) == sorted(oracle)
    np.testing.assert_allclose(rep.deltas, [oracle[g] for g in rep.generations], rtol=1e-9, atol=1e-15)


def test_deltas_match_oracle_crra():
    cfg = with_params(preset("fig1"), gamma=2.5, beta=0.9, e_o=1.5)
    path = build(cfg)
    rep = apply_transfer(path, TransferScheme(1e-3, 12), cfg.pref)
    oracle = _delta_oracle(path, 1e-3, 12, cfg.pref)
    np.testing.assert_allclose(rep.deltas, [oracle[g] for g in rep.generations], rtol=1e-8, atol=1e-15)


def test_old_at_start_gain(fig1_path):
    rep = apply_transfer(fig1_path, TransferScheme(0.01, 24), LOG)
    z = fig1_path.z[fig1_path.index(24)]
    assert rep.old_at_start_delta == pytest.approx(math.log((z + 0.012) / z), rel=1e-12)
    # generations before T_start - 1 are untouched
    pre = rep.deltas[rep.generations < 23]
    assert np.all(pre == 0.0)


def test_transfer_at_fig1_small_eps_improves(fig1_path):
    rep = apply_transfer(fig1_path, TransferScheme(1e-4, 24), LOG)
    assert rep.verdict is WelfareVerdict.IMPROVEMENT
    assert np.all(rep.deltas[rep.generations >= 24][:-1] > 0)


def test_bubbly_path_every_grid_scheme_hurts_someone(fig2_path):
    schemes = list(default_schemes(fig2_path))
    assert len(schemes) == len(DEFAULT_EPS_GRID) * 100
    for scheme in schemes:
        rep = apply_transfer(fig2_path, scheme, LOG)
        assert rep.verdict is WelfareVerdict.NONE_FOUND
        assert np.any(rep.deltas < 0)


@pytest.mark.parametrize("eps, T", [(1e-2, 0), (5e-2, 24), (1e-4, 397)])
def test_resource_conservation(fig1_path, fig2_path, eps, T):
    for path in (fig1_path, fig2_path):
        gap = resource_gap(path, TransferScheme(eps, T))
        resources = path.e_y + path.w + path.e_o / 1.2 + path.r * 1.2**-path.t
        assert np.max(np.abs(gap) / resources) < 1e-12


@pytest.mark.parametrize("t", [24, 50, 200, 398])
def test_small_epsilon_first_order(fig1_path, t):
    eps = 1e-6
    rep = apply_transfer(fig1_path, TransferScheme(eps, 24), LOG)
    delta = rep.deltas[rep.generations == t][0]
    linear = eps * first_order_gain(fig1_path, t, LOG)
    y, z = fig1_path.y[t], fig1_path.z[t + 1]
    second_order = 0.5 * eps**2 * (1 / y**2 + 1.2**2 / z**2)
    assert abs(delta - linear) <= 1.01 * second_order + 1e-18


@pytest.mark.parametrize("t", [10, 24, 100])
def test_delta_concave_in_epsilon(fig1_path, t):
    eps = np.linspace(0, 0.05, 11)
    vals = [apply_transfer(fig1_path, TransferScheme(e, 0), LOG).deltas[t + 1] for e in eps]
    assert np.all(np.diff(vals, 2) < 0)


def test_terminal_generation_not_counted_as_gain():
    # only the last generation would gain: not an improvement
    path = build(preset("fig1"))
    rep = apply_transfer(path, TransferScheme(1e-4, 400), LOG)
    assert rep.deltas[-1] > 0
    assert rep.verdict is WelfareVerdict.NONE_FOUND


# --- improvement_search -----------------------------------------------------------------


def test_search_finds_improvement_fig1(fig1_path):
    rep = improvement_search(fig1_path, LOG)
    assert rep.verdict is WelfareVerdict.IMPROVEMENT
    assert rep.scheme.T_start <= 30
    assert rep.min_delta >= -1e-12
    d = rep.to_dict(include_deltas=True)
    assert d["n_losers"] == 0 and len(d["deltas"]) == len(d["generations"])


def test_search_none_when_rate_above_growth(fig1_cfg):
    cfg = with_params(fig1_cfg, p=1.0)
    rep = improvement_search(build(cfg), cfg.pref)
    assert rep.verdict is WelfareVerdict.NONE_FOUND and rep.scheme is None


def test_search_none_on_bubbly_path(fig2_path):
    rep = improvement_search(fig2_path, LOG)
    assert rep.verdict is WelfareVerdict.NONE_FOUND
    assert rep.to_dict()["epsilon"] is None


def test_search_deterministic(fig1_path):
    a = improvement_search(fig1_path, LOG).to_dict(include_deltas=True)
    b = improvement_search(fig1_path, LOG).to_dict(include_deltas=True)
    assert a == b


def test_default_schemes_respect_feasibility():
    n = 40
    path = synthetic_path(R=1.5, r=0.1, y=np.full(n, 0.005), n=n)
    eps = {s.epsilon for s in default_schemes(path)}
    assert eps == {1e-4, 1e-3}


@settings(max_examples=8, deadline=None)
@given(p=st.floats(2.5, 6.0), gamma=st.floats(0.7, 2.0))
def test_sign_agreement(p, gamma):
    # a positive limiting first-order gain means some grid scheme improves
    cfg = with_params(preset("fig1"), p=p, gamma=gamma, e_o=2.0)
    path = build(cfg)
    assert first_order_gain(path, 399, cfg.pref) > 0
    assert improvement_search(path, cfg.pref).verdict is WelfareVerdict.IMPROVEMENT


@settings(max_examples=8, deadline=None)
@given(p=st.floats(0.3, 1.8))
def test_sign_agreement_negative(p):
    cfg = with_params(preset("fig1"), p=p)
    path = build(cfg)
    assert first_order_gain(path, 399, cfg.pref) < 0
    assert improvement_search(path, cfg.pref).verdict is WelfareVerdict.NONE_FOUND
