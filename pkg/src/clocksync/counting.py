"""Finite-statistics coincidence counts drawn from an ideal rate curve.

Each grid point gets its own generator seeded from ``(master_seed, index)``
through numpy's SeedSequence hash, so counts never depend on the order in
which points are processed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import ScanCurve
from .model import ProtocolConfig

INVERSION_LIMIT = 30.0


@dataclass(frozen=True)
class CountingConfig:
    baseline_counts: float
    master_seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.baseline_counts) and self.baseline_counts >= 1):
            raise ValueError("baseline_counts must be >= 1")
        if int(self.master_seed) != self.master_seed or not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "master_seed", int(self.master_seed))


@dataclass(frozen=True)
class CountCurve:
    dl: np.ndarray
    counts: np.ndarray
    expected: np.ndarray
    config: ProtocolConfig | None = field(default=None, compare=False)

    def __post_init__(self):
        if not (len(self.dl) == len(self.counts) == len(self.expected)):
            raise ValueError("dl, counts and expected must have equal length")
        if np.any(np.asarray(self.counts) < 0):
            raise ValueError("counts must be nonnegative")


def point_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([master_seed, index])))


def _poisson_inversion(lam, rng):
    # sequential search on the CDF
    u = rng.random()
    k = 0
    p = math.exp(-lam)
    cdf = p
    while u > cdf:
        k += 1
        p *= lam / k
        cdf += p
        if p == 0.0 and cdf < u:
            # CDF saturated below u through rounding; u is in the far tail
            break
    return k


def _poisson_ptrs(lam, rng):
    # transformed rejection with squeeze (Hormann 1993)
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u = rng.random() - 0.5
        v = rng.random()
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + lam + 0.43)
        if us >= 0.07 and v <= vr:
            return k
        if k < 0 or (us < 0.013 and v > us):
            continue
        if (math.log(v) + math.log(inv_alpha) - math.log(a / (us * us) + b)
                <= -lam + k * loglam - math.lgamma(k + 1)):
            return k


def poisson(lam: float, rng: np.random.Generator) -> int:
    """One Poisson variate: CDF inversion below mean 30, PTRS rejection above."""
    if lam < 0 or not math.isfinite(lam):
        raise ValueError("Poisson mean must be finite and nonnegative")
    if lam == 0.0:
        return 0
    if lam < INVERSION_LIMIT:
        return _poisson_inversion(lam, rng)
    return _poisson_ptrs(lam, rng)


def sample_counts(curve: ScanCurve, cfg: CountingConfig) -> CountCurve:
    """Poisson counts with mean ``baseline_counts * p_c`` at every grid point."""
    pc = np.asarray(curve.p_c, dtype=float)
    if np.any(pc < 0):
        raise ValueError("rate curve has negative values")
    means = cfg.baseline_counts * pc
    counts = np.array([poisson(float(m), point_rng(cfg.master_seed, i)) for i, m in enumerate(means)],
                      dtype=np.int64)
    return CountCurve(curve.dl, counts, means, curve.config)
