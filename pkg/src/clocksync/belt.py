"""Classical conveyor-belt synchronization.

A belt element passes A (Alice deposits k times her clock reading), then B
(Bob removes 2k times his reading), then A' (Alice deposits again) and is
read out at M. Arithmetic is carried out on exact rationals built from the
float inputs, so the steady-state read-out is exactly independent of the
read-out time. Read-outs are returned as ``Fraction``; convert with
``float`` for reporting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import TransientRegion


@dataclass(frozen=True)
class BeltConfig:
    k: float
    t0a: float
    t0b: float
    T_ab: float
    T_ba: float
    period: float | None = None

    def __post_init__(self):
        for name in ("k", "t0a", "t0b", "T_ab", "T_ba"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.k > 0:
            raise ValueError("k must be positive")
        if not (self.T_ab > 0 and self.T_ba > 0):
            raise ValueError("belt travel times must be positive")
        if self.period is not None and not (math.isfinite(self.period) and self.period > 0):
            raise ValueError("period must be positive")

    @property
    def tau(self) -> Fraction:
        return Fraction(self.t0b) - Fraction(self.t0a)

    @property
    def settle_time(self) -> Fraction:
        """Earliest read-out time past the initial transient."""
        return Fraction(max(self.t0a, self.t0b)) + Fraction(self.T_ab) + Fraction(self.T_ba)


def _wrap(q: Fraction, period) -> Fraction:
    if period is None:
        return q
    return q % Fraction(period)


def quantity_at_M(cfg: BeltConfig, t) -> Fraction:
    """Quantity carried by the element read out at M at time ``t``."""
    if Fraction(t) < cfg.settle_time:
        raise TransientRegion(f"t={t!r} is inside the initial transient (ends at {float(cfg.settle_time)!r})")
    k, t0a, t0b = Fraction(cfg.k), Fraction(cfg.t0a), Fraction(cfg.t0b)
    tab, tba = Fraction(cfg.T_ab), Fraction(cfg.T_ba)
    s = Fraction(t) - tab - tba  # element passes A at s, B at s + T_ab, A' at s + T_ab + T_ba
    q = k * (s - t0a) - 2 * k * (s + tab - t0b) + k * (s + tab + tba - t0a)
    return _wrap(q, cfg.period)


def asymmetry_bias(cfg: BeltConfig) -> Fraction:
    """Offset k (T_ba - T_ab) that unequal travel times add to the read-out."""
    return Fraction(cfg.k) * (Fraction(cfg.T_ba) - Fraction(cfg.T_ab))


def infer_tau_from_M(q, cfg: BeltConfig) -> Fraction:
    """Clock offset q / (2k), assuming equal travel times both ways.

    With a wrap period the result is only defined modulo period / (2k).
    """
    return Fraction(q) / (2 * Fraction(cfg.k))
