"""Dip location, clock-offset recovery and the timing error budget."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .counting import CountCurve
from .engine import ScanCurve
from .errors import EdgeDip, NoDipFound, NotConverged
from .model import SPEED_OF_LIGHT, ProtocolConfig

MIN_CONTRAST = 0.2
OUTER_FRACTION = 0.2
MAX_ITER = 100
STEP_RTOL = 1e-10
_FD_STEP = 1e-6


@dataclass(frozen=True)
class EstimateReport:
    dl0_hat: float
    tau_hat: float
    width_hat: float  # 1/e half-width in dl, metres
    baseline_hat: float
    converged: bool
    iterations: int
    dl0_sigma: float = math.nan
    tau_sigma: float = math.nan
    residual: float = math.nan  # weighted sum of squared residuals at the solution


@dataclass(frozen=True)
class ErrorBudget:
    delta_tau: float
    term_dip: float
    term_velocity: float


def tau_from_dip(dl0: float, config: ProtocolConfig) -> float:
    """Clock offset from a dip position: dl0 (1 + beta) / (4 v)."""
    return dl0 * (1.0 + config.beta) / (4.0 * config.v)


def error_budget(delta_omega, v, delta_v, tau, c=SPEED_OF_LIGHT) -> ErrorBudget:
    """Timing uncertainty from the dip resolution and the delay-rate uncertainty."""
    if not (v > 0 and delta_omega > 0):
        raise ValueError("error budget needs v > 0 and delta_omega > 0")
    term_dip = 1.0 / (4.0 * delta_omega * (v / c))
    term_velocity = abs(delta_v / v) * abs(tau)
    return ErrorBudget(math.hypot(term_dip, term_velocity), term_dip, term_velocity)


def dip_model(dl, baseline, bandwidth, dl0, c=SPEED_OF_LIGHT):
    """Gaussian dip B [1 - exp(-2 W^2 (dl - dl0)^2 / c^2)]."""
    x = (np.asarray(dl, dtype=float) - dl0) / c
    return -baseline * np.expm1(-2.0 * bandwidth**2 * x**2)


def _curve_data(curve):
    if isinstance(curve, CountCurve):
        y = np.asarray(curve.counts, dtype=float)
        return np.asarray(curve.dl, dtype=float), y, 1.0 / np.maximum(y, 1.0)
    if isinstance(curve, ScanCurve):
        y = np.asarray(curve.p_c, dtype=float)
        return np.asarray(curve.dl, dtype=float), y, np.ones_like(y)
    raise TypeError(f"cannot fit a {type(curve).__name__}")


def _coarse(x, y):
    """Baseline guess, parabolic vertex at the grid minimum, and a half-width guess."""
    n = len(x)
    k = max(1, int(round(0.5 * OUTER_FRACTION * n)))
    baseline = float(np.median(np.concatenate([y[:k], y[-k:]])))
    i = int(np.argmin(y))
    if i == 0 or i == n - 1:
        raise EdgeDip(f"minimum at grid edge (index {i}); widen the scan")
    if not baseline > 0 or (baseline - y[i]) / baseline <= MIN_CONTRAST:
        raise NoDipFound(f"dip contrast below {MIN_CONTRAST}")
    x0, x1, x2 = x[i - 1], x[i], x[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    bq = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
    vertex = -bq / (2.0 * a) if a > 0 else x1
    vertex = min(max(vertex, x0), x2)
    spacing = float(np.median(np.diff(x)))
    below = int(np.count_nonzero(y < baseline * (1.0 - math.exp(-1.0))))
    half_width = 0.5 * max(below, 2) * spacing
    return baseline, vertex, half_width


def fit_dip(x, y, weights=None, c=SPEED_OF_LIGHT, strict=True):
    """Weighted damped Gauss-Newton fit of ``dip_model`` to ``(x, y)``.

    Returns ``(baseline, bandwidth, dl0, iterations, converged, dl0_sigma, residual)``.
    Sensitivities are central differences in scaled parameters.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    sw = np.sqrt(w)
    b0, vertex, hw0 = _coarse(x, y)
    w0 = c / (math.sqrt(2.0) * hw0)
    scale = np.array([b0, w0, hw0])
    offset = np.array([0.0, 0.0, vertex])

    def unpack(p):
        return offset + scale * p

    def resid(p):
        b, bw, d0 = unpack(p)
        return sw * (dip_model(x, b, bw, d0, c) - y)

    def jac(p):
        cols = []
        for j in range(3):
            e = np.zeros(3)
            e[j] = _FD_STEP
            cols.append((resid(p + e) - resid(p - e)) / (2.0 * _FD_STEP))
        return np.column_stack(cols)

    p = np.array([1.0, 1.0, 0.0])
    r = resid(p)
    cost = float(r @ r)
    lam = 1e-3
    converged = False
    it = 0
    while it < MAX_ITER:
        it += 1
        J = jac(p)
        A = J.T @ J
        g = J.T @ r
        while True:
            step = np.linalg.solve(A + lam * np.diag(np.diag(A)), -g)
            trial = p + step
            r_t = resid(trial)
            cost_t = float(r_t @ r_t)
            small = np.max(np.abs(step) / np.maximum(np.abs(trial), 1.0)) < STEP_RTOL
            if cost_t <= cost:
                p, r, cost = trial, r_t, cost_t
                lam = max(lam / 10.0, 1e-12)
                break
            lam *= 10.0
            if small or lam > 1e16:
                break
        if small:
            converged = True
            break
    b, bw, d0 = unpack(p)
    if not converged and strict:
        raise NotConverged(f"dip fit stopped after {it} iterations, residual {cost:.6g}", residual=cost)
    J = jac(p)
    dof = max(len(x) - 3, 1)
    try:
        cov = np.linalg.inv(J.T @ J) * (cost / dof)
        sigma = float(np.sqrt(max(cov[2, 2], 0.0))) * hw0
    except np.linalg.LinAlgError:
        sigma = math.nan
    return float(b), abs(float(bw)), float(d0), it, converged, sigma, cost


def locate_dip(curve, config: ProtocolConfig | None = None, strict=True) -> EstimateReport:
    """Fit the coincidence dip of a rate or count curve and convert it to a clock offset.

    ``config`` defaults to the configuration attached to the curve; it
    supplies v and beta for the offset conversion.
    """
    config = config if config is not None else curve.config
    if config is None:
        raise ValueError("locate_dip needs the protocol configuration to convert dl0 to tau")
    x, y, w = _curve_data(curve)
    b, bw, d0, it, ok, sigma, cost = fit_dip(x, y, w, config.c, strict=strict)
    width = config.c / (math.sqrt(2.0) * bw)
    return EstimateReport(
        dl0_hat=d0,
        tau_hat=tau_from_dip(d0, config),
        width_hat=width,
        baseline_hat=b,
        converged=ok,
        iterations=it,
        dl0_sigma=sigma,
        tau_sigma=abs(tau_from_dip(sigma, config)),
        residual=cost,
    )
