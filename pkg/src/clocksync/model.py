"""Physical configuration of the synchronization interferometer.

All quantities are SI; angular frequencies are rad/s and frequency offsets
are measured from the degenerate frequency omega0 (half the pump frequency).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError

SPEED_OF_LIGHT = 299792458.0
MAX_BETA = 1e-3
# Gaussian spectra are integrated over +-GAUSS_WINDOW standard deviations.
GAUSS_WINDOW = 8.0
SYMMETRY_RTOL = 1e-12


def _finite(name, value):
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class SpectralDensity:
    """Two-photon spectral density |phi(w)|^2 as a function of offset w.

    ``kind`` is ``"gaussian"`` (variance ``delta_omega**2``) or
    ``"tabulated"`` (``samples`` of ``(offset, density)``, linearly
    interpolated, zero outside the sampled support). Tabulated samples are
    stored as given and rescaled to unit area on evaluation.
    """

    kind: str
    delta_omega: float | None = None
    samples: tuple = ()
    _xs: np.ndarray = field(init=False, repr=False, compare=False)
    _ys: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "gaussian":
            if self.delta_omega is None:
                raise ConfigError("gaussian spectrum needs delta_omega")
            dw = _finite("delta_omega", self.delta_omega)
            if dw <= 0:
                raise ConfigError("delta_omega must be positive")
            object.__setattr__(self, "delta_omega", dw)
            object.__setattr__(self, "_xs", np.empty(0))
            object.__setattr__(self, "_ys", np.empty(0))
        elif self.kind == "tabulated":
            self._init_tabulated()
        else:
            raise ConfigError(f"unknown spectrum kind {self.kind!r}")

    def _init_tabulated(self):
        pts = tuple((float(w), float(d)) for w, d in self.samples)
        if len(pts) < 3:
            raise ConfigError("tabulated spectrum needs at least 3 samples")
        pts = tuple(sorted(pts))
        xs = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise ConfigError("tabulated spectrum samples must be finite")
        if np.any(ys < 0):
            raise ConfigError("spectral density must be nonnegative")
        if np.any(np.diff(xs) <= 0):
            raise ConfigError("tabulated offsets must be distinct")
        scale_x = np.max(np.abs(xs))
        if np.any(np.abs(xs + xs[::-1]) > SYMMETRY_RTOL * scale_x):
            raise ConfigError("tabulated offsets are not symmetric about 0")
        if np.any(np.abs(ys - ys[::-1]) > SYMMETRY_RTOL * np.maximum(np.abs(ys), np.abs(ys[::-1]))):
            raise ConfigError("tabulated density is not even in the offset")
        # exact symmetrization within the tolerance admitted above
        xs = 0.5 * (xs - xs[::-1])
        ys = 0.5 * (ys + ys[::-1])
        area = float(np.sum(0.5 * (ys[1:] + ys[:-1]) * np.diff(xs)))
        if area <= 0:
            raise ConfigError("tabulated density has zero area")
        xs.setflags(write=False)
        ys = ys / area
        ys.setflags(write=False)
        object.__setattr__(self, "samples", pts)
        object.__setattr__(self, "_xs", xs)
        object.__setattr__(self, "_ys", ys)

    @classmethod
    def gaussian(cls, delta_omega):
        return cls("gaussian", delta_omega=delta_omega)

    @classmethod
    def tabulated(cls, samples: Sequence[tuple[float, float]]):
        return cls("tabulated", samples=tuple(samples))

    def __call__(self, w):
        """Evaluate the normalized density at offset(s) ``w``."""
        w = np.asarray(w, dtype=float)
        if self.kind == "gaussian":
            dw = self.delta_omega
            return np.exp(-0.5 * (w / dw) ** 2) / (math.sqrt(2.0 * math.pi) * dw)
        return np.interp(w, self._xs, self._ys, left=0.0, right=0.0)

    def window(self) -> tuple[float, float]:
        """Integration support in offset frequency."""
        if self.kind == "gaussian":
            half = GAUSS_WINDOW * self.delta_omega
            return -half, half
        return float(self._xs[0]), float(self._xs[-1])

    def breakpoints(self) -> np.ndarray:
        """Points where the density is not smooth; quadrature panels align to them."""
        if self.kind == "gaussian":
            lo, hi = self.window()
            return np.array([lo, hi])
        return self._xs

    def rms_width(self) -> float:
        if self.kind == "gaussian":
            return self.delta_omega
        xs, ys = self._xs, self._ys
        # exact second moment of the piecewise-linear density
        x0, x1, y0, y1 = xs[:-1], xs[1:], ys[:-1], ys[1:]
        h = x1 - x0
        m2 = h / 12.0 * (y0 * (3 * x0**2 + 2 * x0 * x1 + x1**2) + y1 * (x0**2 + 2 * x0 * x1 + 3 * x1**2))
        return math.sqrt(float(np.sum(m2)))

    def to_dict(self) -> dict:
        if self.kind == "gaussian":
            return {"kind": "gaussian", "delta_omega": self.delta_omega}
        return {"kind": "tabulated", "samples": [list(p) for p in self.samples]}

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralDensity":
        if d.get("kind") == "gaussian":
            return cls.gaussian(d["delta_omega"])
        if d.get("kind") == "tabulated":
            return cls.tabulated([tuple(p) for p in d["samples"]])
        raise ConfigError(f"unknown spectrum kind {d.get('kind')!r}")


@dataclass(frozen=True)
class DispersionProfile:
    """Phase kappa(w) = sum_k coeffs[k] * (w - center)**k of one medium segment."""

    center: float
    coeffs: tuple = ()
    max_degree: int = 8

    def __post_init__(self):
        _finite("center", self.center)
        if self.center <= 0:
            raise ConfigError("dispersion center must be a positive frequency")
        coeffs = tuple(_finite("dispersion coefficient", c) for c in self.coeffs)
        if len(coeffs) - 1 > self.max_degree:
            raise ConfigError(f"dispersion degree {len(coeffs) - 1} exceeds {self.max_degree}")
        object.__setattr__(self, "center", float(self.center))
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def is_zero(self):
        return all(c == 0.0 for c in self.coeffs)

    def at_offset(self, d):
        """Evaluate at frequency ``center + d`` given the offset ``d`` directly."""
        acc = 0.0 * d
        for c in reversed(self.coeffs):
            acc = acc * d + c
        return acc

    def __call__(self, w):
        return self.at_offset(w - self.center)


@dataclass(frozen=True)
class MediumConfig:
    kappa_to_signal: DispersionProfile
    kappa_from_signal: DispersionProfile
    kappa_to_idler: DispersionProfile
    kappa_from_idler: DispersionProfile

    def __post_init__(self):
        centers = {p.center for p in self.profiles()}
        if len(centers) != 1:
            raise ConfigError("all four dispersion profiles must share the same center")

    def profiles(self):
        return (self.kappa_to_signal, self.kappa_from_signal, self.kappa_to_idler, self.kappa_from_idler)

    @property
    def center(self):
        return self.kappa_to_signal.center

    @classmethod
    def vacuum(cls, center):
        z = DispersionProfile(center, ())
        return cls(z, z, z, z)

    @classmethod
    def from_coeffs(cls, center, to_signal=(), from_signal=(), to_idler=(), from_idler=()):
        return cls(
            DispersionProfile(center, tuple(to_signal)),
            DispersionProfile(center, tuple(from_signal)),
            DispersionProfile(center, tuple(to_idler)),
            DispersionProfile(center, tuple(from_idler)),
        )

    @classmethod
    def matched(cls, center, to_signal=(), from_signal=()):
        """Medium obeying kappa_t^S == kappa_f^I and kappa_f^S == kappa_t^I."""
        return cls.from_coeffs(center, to_signal, from_signal, from_signal, to_signal)

    @property
    def is_matched(self):
        return (self.kappa_to_signal.coeffs == self.kappa_from_idler.coeffs
                and self.kappa_from_signal.coeffs == self.kappa_to_idler.coeffs)

    def to_dict(self):
        return {
            "kappa_to_signal": list(self.kappa_to_signal.coeffs),
            "kappa_from_signal": list(self.kappa_from_signal.coeffs),
            "kappa_to_idler": list(self.kappa_to_idler.coeffs),
            "kappa_from_idler": list(self.kappa_from_idler.coeffs),
        }


@dataclass(frozen=True)
class ProtocolConfig:
    """Interferometer, clocks, medium and source spectrum.

    The clock offset is ``tau = t0b - t0a``. Validation rejects ``v <= 0``
    (no timing information in the dip), ``beta >= 1e-3``, negative
    geometry, and spectra whose support reaches the degenerate frequency.
    """

    omega0: float
    v: float
    t0a: float
    t0b: float
    spectrum: SpectralDensity
    medium: MediumConfig | None = None
    L: float = 0.0
    L_prime: float = 0.0
    x0: float = 0.0
    c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        for name in ("omega0", "v", "t0a", "t0b", "L", "L_prime", "x0", "c"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        if self.c != SPEED_OF_LIGHT:
            raise ConfigError("c is fixed at 299792458 m/s")
        if self.omega0 <= 0:
            raise ConfigError("omega0 must be positive")
        if self.v <= 0:
            raise ConfigError("v must be positive; v = 0 carries no clock information")
        if self.v / self.c >= MAX_BETA:
            raise ConfigError(f"v/c must stay below {MAX_BETA}")
        for name in ("L", "L_prime", "x0"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative")
        if not isinstance(self.spectrum, SpectralDensity):
            raise ConfigError("spectrum must be a SpectralDensity")
        lo, hi = self.spectrum.window()
        if max(-lo, hi) >= self.omega0:
            raise ConfigError("spectral window must stay inside (0, 2*omega0); need 8*delta_omega < omega0")
        if self.medium is None:
            object.__setattr__(self, "medium", MediumConfig.vacuum(self.omega0))
        elif self.medium.center != self.omega0:
            raise ConfigError("medium dispersion center must equal omega0")

    @property
    def tau(self):
        return self.t0b - self.t0a

    @property
    def beta(self):
        return beta(self)

    @property
    def chi(self):
        return doppler_chi(self)

    @property
    def chi_excess(self):
        return doppler_excess(self.beta)


def _velocity(config_or_v):
    if isinstance(config_or_v, ProtocolConfig):
        return config_or_v.v, config_or_v.c
    return float(config_or_v), SPEED_OF_LIGHT


def beta(config_or_v) -> float:
    """v/c for a config or a bare velocity in m/s."""
    v, c = _velocity(config_or_v)
    return v / c


def doppler_chi(config_or_beta) -> float:
    """Doppler factor (1+b)/(1-b); accepts a config or a bare beta."""
    b = config_or_beta.beta if isinstance(config_or_beta, ProtocolConfig) else float(config_or_beta)
    if not b < 1.0:
        raise ValueError("beta must be below 1")
    return (1.0 + b) / (1.0 - b)


def doppler_excess(b) -> float:
    """chi - 1 = 2b/(1-b) without the cancellation of forming chi first."""
    return 2.0 * b / (1.0 - b)


def dip_position(config: ProtocolConfig) -> float:
    """Beam-splitter offset of the coincidence dip, 4 v tau / (1 + beta)."""
    return 4.0 * (config.v * config.tau) / (1.0 + config.beta)


def delay_schedule(config: ProtocolConfig, t):
    """Moving-mirror delays (dl_a^I, dl_b^I, dl_a^S, dl_b^S) at lab time t."""
    v = config.v
    da = v * (t - config.t0a)
    db = v * (t - config.t0b)
    return da, -db, -da, db
