"""Exit criteria. Each test records one PASS/FAIL line shown in the pytest summary."""
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from clocksync import (
    BeltConfig,
    CountingConfig,
    MediumConfig,
    ProtocolConfig,
    ScanGrid,
    SpectralDensity,
    amplitude_collapsed,
    amplitude_direct,
    coincidence_rate,
    coincidence_rate_gaussian,
    delta_kappa,
    dip_position,
    error_budget,
    infer_tau_from_M,
    locate_dip,
    quantity_at_M,
    sample_counts,
    scan,
)
from clocksync import quadrature
from clocksync.belt import asymmetry_bias
from clocksync.cli import main
from helpers import DW, OMEGA0, dip_config, random_coeffs, random_matched_medium

pytestmark = pytest.mark.acceptance

C = 299792458.0
DIP_GRID = ScanGrid(-1.5e-6, 1.5e-6, 301)
CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def test_ac1_closed_form_oracle(criterion):
    cfg = dip_config()
    t = time.perf_counter()
    curve = scan(cfg, DIP_GRID)
    elapsed = time.perf_counter() - t
    err = float(np.max(np.abs(curve.p_c - coincidence_rate_gaussian(DW, curve.dl, dip_position(cfg), C))))
    ok = err < 1e-6 and elapsed < 5.0
    criterion("AC1 quadrature vs closed-form dip", ok, f"max|err|={err:.2e} (<1e-6), t={elapsed:.3f}s (<5s)")
    assert ok


def test_ac2_moving_dip(criterion, tmp_path):
    target = C / (math.sqrt(2) * DW)
    moving = locate_dip(scan(dip_config(), DIP_GRID))
    reference = locate_dip(scan(dip_config(tau=0.0), DIP_GRID))
    out = tmp_path / "dip.csv"
    code = main(["scan", "--config", str(CONFIGS / "dip_v50.json"), "--out", str(out)])
    rows = out.read_text().splitlines()
    ok = (abs(moving.dl0_hat - 2.000e-7) < 1e-9
          and abs(reference.dl0_hat) < 1e-12
          and abs(moving.width_hat / target - 1) < 0.05
          and abs(reference.width_hat / target - 1) < 0.05
          and code == 0 and rows[0] == "delta_l_m,p_c" and len(rows) == 302)
    criterion("AC2 moving-mirror and reference dips", ok,
              f"dl0(v=50)={moving.dl0_hat:.6e} m, dl0(ref)={reference.dl0_hat:.1e} m, "
              f"width/target={moving.width_hat / target:.4f}, csv rows={len(rows) - 1}")
    assert ok


def test_ac3_all_orders_cancellation(criterion):
    rng = np.random.default_rng(2024)
    grid = ScanGrid(-1.5e-6, 1.5e-6, 101)
    worst_dk = worst_curve = worst_tau = 0.0
    for _ in range(100):
        v = float(rng.uniform(10.0, 1e3))
        # keep the dip 4 v tau inside the scan window
        tau = float(rng.uniform(-2.5e-7, 2.5e-7)) / v
        med = random_matched_medium(rng, degree=int(rng.integers(1, 7)))
        kw = dict(L=float(rng.uniform(0, 1e7)), L_prime=float(rng.uniform(0, 1e4)), x0=float(rng.uniform(0, 10)))
        vac_cfg = dip_config(v=v, tau=tau, **kw)
        med_cfg = dip_config(v=v, tau=tau, medium=med, **kw)
        for lvl in range(3, 11):
            u, _ = quadrature.composite_nodes(med_cfg.spectrum.breakpoints(), lvl)
            dk = delta_kappa(med, med_cfg.chi, OMEGA0 + u, OMEGA0, chi_excess=med_cfg.chi_excess)
            worst_dk = max(worst_dk, float(np.max(np.abs(dk))))
        a, b = scan(vac_cfg, grid), scan(med_cfg, grid)
        worst_curve = max(worst_curve, float(np.max(np.abs(a.p_c - b.p_c))))
        worst_tau = max(worst_tau, abs(locate_dip(a).tau_hat - locate_dip(b).tau_hat))
    ok = worst_dk < 1e-12 and worst_curve <= 1e-9 and worst_tau <= 1e-12
    criterion("AC3 matched media cancel to all orders", ok,
              f"max|dkappa|={worst_dk:.1e} rad, max|dPc|={worst_curve:.1e}, max|dtau|={worst_tau:.1e} s")
    assert ok


def _random_config(rng, scale=1e3, **fixed):
    dw = float(rng.uniform(1e14, 1e15))
    omega0 = float(rng.uniform(1e16, 3e16))
    t0a = float(rng.uniform(0, 1e3))
    med = MediumConfig.from_coeffs(omega0, *[random_coeffs(rng, int(rng.integers(0, 7)), scale, dw) for _ in range(4)])
    kw = dict(omega0=omega0, v=float(rng.uniform(1.0, 1e4)), t0a=t0a, t0b=t0a + float(rng.uniform(-5e-9, 5e-9)),
              spectrum=SpectralDensity.gaussian(dw), medium=med,
              L=float(rng.uniform(0, 1e7)), L_prime=float(rng.uniform(0, 1e5)), x0=float(rng.uniform(0, 1e2)))
    kw.update(fixed)
    return ProtocolConfig(**kw)


def test_ac4_direct_vs_collapsed(criterion):
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(1000):
        cfg = _random_config(rng)
        w1 = cfg.omega0 + float(rng.uniform(-5, 5)) * cfg.spectrum.delta_omega
        dl = float(rng.uniform(-2e-6, 2e-6))
        a = abs(amplitude_direct(cfg, w1, dl)) ** 2
        b = abs(amplitude_collapsed(cfg, w1, dl, exact=True)) ** 2
        worst = max(worst, abs(a - b) / max(a, b))
    geo_worst = 0.0
    rate_spread = 0.0
    for _ in range(10):
        # mild medium so the rate integral stays resolvable
        base = _random_config(rng, scale=1e-1)
        w1 = base.omega0 + float(rng.uniform(-3, 3)) * base.spectrum.delta_omega
        dl = float(rng.uniform(-2e-6, 2e-6))
        vals, rates = [], []
        for L in (0.0, 1e3, 1e7):
            for Lp in (0.0, 1e3, 1e7):
                for x0 in (0.0, 1e3, 1e7):
                    cfg = _random_config(rng, **{**_fields(base), "L": L, "L_prime": Lp, "x0": x0})
                    vals.append(abs(amplitude_direct(cfg, w1, dl)) ** 2)
                    rates.append(coincidence_rate(cfg, dl))
        geo_worst = max(geo_worst, (max(vals) - min(vals)) / max(vals))
        rate_spread = max(rate_spread, max(rates) - min(rates))
    ok = worst <= 1e-12 and geo_worst <= 1e-12 and rate_spread <= 1e-12
    criterion("AC4 direct vs collapsed amplitude, geometry invariance", ok,
              f"max rel diff={worst:.1e}, geometry rel spread={geo_worst:.1e}, rate spread={rate_spread:.1e}")
    assert ok


def _fields(cfg):
    return dict(omega0=cfg.omega0, v=cfg.v, t0a=cfg.t0a, t0b=cfg.t0b, spectrum=cfg.spectrum, medium=cfg.medium)


def test_ac5_estimator_round_trip(criterion):
    errs = []
    for tau in (-2e-9, -1e-9, 0.0, 1e-9, 2e-9):
        errs.append(abs(locate_dip(scan(dip_config(tau=tau), DIP_GRID)).tau_hat - tau))
    curve = scan(dip_config(), DIP_GRID)
    taus = np.array([locate_dip(sample_counts(curve, CountingConfig(1e4, seed))).tau_hat for seed in range(50)])
    spread = float(taus.std(ddof=1))
    bias = float(taus.mean() - 1e-9)
    ok = max(errs) < 1e-11 and math.isfinite(spread) and spread > 0 and abs(bias) < spread / math.sqrt(50)
    criterion("AC5 estimator round trip", ok,
              f"noiseless max|err|={max(errs):.1e} s; poisson spread={spread:.2e} s, "
              f"|bias|={abs(bias):.2e} < {spread / math.sqrt(50):.2e}")
    assert ok


def test_ac6_error_budget(criterion):
    b = error_budget(1e15, 500.0, 50.0, 1e-9, C)
    ok = abs(b.delta_tau / 1.80e-10 - 1) <= 0.01
    criterion("AC6 error budget", ok,
              f"delta_tau={b.delta_tau:.4e} s (1.80e-10 +-1%), dip={b.term_dip:.4e}, velocity={b.term_velocity:.4e}")
    assert ok


def test_ac7_belt_identities(criterion):
    from fractions import Fraction

    rng = np.random.default_rng(7)
    ok = True
    for _ in range(200):
        k = float(rng.uniform(0.1, 10))
        t0a, t0b = float(rng.uniform(-100, 100)), float(rng.uniform(-100, 100))
        tab, tba = float(rng.uniform(0.1, 50)), float(rng.uniform(0.1, 50))
        cfg = BeltConfig(k, t0a, t0b, tab, tba)
        ts = float(cfg.settle_time) + rng.uniform(0, 1e6, 5)
        qs = {quantity_at_M(cfg, float(t)) for t in ts}
        ok &= len(qs) == 1
        q = qs.pop()
        ok &= q - 2 * Fraction(k) * cfg.tau == Fraction(k) * (Fraction(tba) - Fraction(tab)) == asymmetry_bias(cfg)
        sym = BeltConfig(k, t0a, t0b, tab, tab)
        qsym = quantity_at_M(sym, float(sym.settle_time) + 1.0)
        ok &= qsym == 2 * Fraction(k) * sym.tau and infer_tau_from_M(qsym, sym) == sym.tau
    criterion("AC7 belt identities exact", ok, "200 random belts: constancy, 2k tau, bias k dT")
    assert ok


def test_ac8_determinism(criterion, tmp_path):
    runs = [
        ["scan", "--config", str(CONFIGS / "noisy_v50.json")],
        ["scan", "--config", str(CONFIGS / "matched_medium.json")],
        ["estimate", "--config", str(CONFIGS / "noisy_v50.json")],
        ["estimate", "--config", str(CONFIGS / "accuracy_v500.json")],
        ["sweep", "--config", str(CONFIGS / "sweep_tau.json")],
        ["sweep", "--config", str(CONFIGS / "sweep_c3.json")],
        ["belt", "--config", str(CONFIGS / "belt.json")],
        ["budget", "--config", str(CONFIGS / "accuracy_v500.json")],
    ]
    ok = True
    for i, argv in enumerate(runs):
        outs = []
        for j, workers in enumerate(("1", "1", "8")):
            out = tmp_path / f"{i}_{j}.out"
            extra = ["--workers", workers] if argv[0] in ("scan", "estimate", "sweep") else []
            assert main(argv + extra + ["--out", str(out)]) == 0
            outs.append(out.read_bytes())
        ok &= outs[0] == outs[1] == outs[2]
    criterion("AC8 byte-identical outputs across runs and worker counts", ok, f"{len(runs)} commands x 3 runs")
    assert ok
