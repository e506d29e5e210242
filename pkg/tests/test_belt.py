from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clocksync import BeltConfig, infer_tau_from_M, quantity_at_M
from clocksync.belt import asymmetry_bias
from clocksync.errors import TransientRegion


def simulate_belt(k, t0a, t0b, T_ab, T_ba, steps):
    """Cell-by-cell belt with integer clock ticks; returns read-outs at M per tick."""
    length = T_ab + T_ba
    cells = [0] * (length + 1)
    readings = {}
    for t in range(steps):
        cells = [0] + cells[:-1]  # advance one cell per tick; index 0 is A
        if t >= t0a:
            cells[0] += k * (t - t0a)
            cells[length] += k * (t - t0a)  # A' sits just before M
        if t >= t0b:
            cells[T_ab] -= 2 * k * (t - t0b)
        readings[t] = cells[length]
    return readings


def test_examples():
    assert quantity_at_M(BeltConfig(1.0, 0.0, 0.0, 5.0, 5.0), 20.0) == 0
    cfg = BeltConfig(1.0, 0.0, 2.0, 5.0, 5.0)
    assert {quantity_at_M(cfg, t) for t in (12.0, 13.5, 1e3, 1e9)} == {4}
    assert quantity_at_M(BeltConfig(1.0, 0.0, 0.0, 5.0, 7.0), 12.0) == 2
    assert infer_tau_from_M(0.0, cfg) == 0
    assert infer_tau_from_M(4.0, cfg) == 2
    assert infer_tau_from_M(quantity_at_M(BeltConfig(1.0, 0.0, 0.0, 5.0, 7.0), 50.0), cfg) == 1


def test_transient_rejected():
    cfg = BeltConfig(1.0, 0.0, 2.0, 5.0, 5.0)
    with pytest.raises(TransientRegion):
        quantity_at_M(cfg, 11.9)


def test_period_wrap():
    cfg = BeltConfig(1.0, 0.0, 2.0, 5.0, 5.0, period=3.0)
    assert quantity_at_M(cfg, 30.0) == 1


def test_matches_discrete_belt():
    k, t0a, t0b, T_ab, T_ba = 3, 4, 9, 6, 8
    readings = simulate_belt(k, t0a, t0b, T_ab, T_ba, 80)
    cfg = BeltConfig(float(k), float(t0a), float(t0b), float(T_ab), float(T_ba))
    settle = int(cfg.settle_time)
    for t in range(settle, 80):
        assert readings[t] == quantity_at_M(cfg, float(t))
    # before settling the discrete belt still drifts
    assert len({readings[t] for t in range(t0a, settle)}) > 1


times = st.floats(-1e6, 1e6)
pos = st.floats(1e-3, 1e4)


@given(k=pos, t0a=times, t0b=times, tab=pos, tba=pos, d1=st.floats(0, 1e7), d2=st.floats(0, 1e7))
def test_time_independent(k, t0a, t0b, tab, tba, d1, d2):
    cfg = BeltConfig(k, t0a, t0b, tab, tba)
    t1 = float(cfg.settle_time) + d1 + 1.0
    t2 = float(cfg.settle_time) + d2 + 1.0
    assert quantity_at_M(cfg, t1) == quantity_at_M(cfg, t2)


@given(k=pos, t0a=times, t0b=times, T=pos)
def test_symmetric_identity_and_round_trip(k, t0a, t0b, T):
    cfg = BeltConfig(k, t0a, t0b, T, T)
    q = quantity_at_M(cfg, float(cfg.settle_time) + 1.0)
    assert q == 2 * Fraction(k) * cfg.tau
    assert infer_tau_from_M(q, cfg) == cfg.tau


@given(k=pos, t0a=times, t0b=times, tab=pos, tba=pos)
def test_asymmetry_bias(k, t0a, t0b, tab, tba):
    cfg = BeltConfig(k, t0a, t0b, tab, tba)
    q = quantity_at_M(cfg, float(cfg.settle_time) + 2.0)
    assert q - 2 * Fraction(k) * cfg.tau == asymmetry_bias(cfg) == Fraction(k) * (Fraction(tba) - Fraction(tab))


def test_config_validation():
    for bad in [dict(k=0.0), dict(T_ab=0.0), dict(T_ba=-1.0), dict(period=0.0)]:
        kw = dict(k=1.0, t0a=0.0, t0b=0.0, T_ab=1.0, T_ba=1.0)
        kw.update(bad)
        with pytest.raises(ValueError):
            BeltConfig(**kw)
