"""Two-photon amplitudes and the wide-window coincidence rate.

Two independent routes are provided. The collapsed route evaluates the
reduced interference phase

    Theta(u) = 2 u (dl0 - dl) / c - dkappa(omega0 + u)

in float64 (extended precision on request). The direct route rebuilds the on-shell matrix element from the
double-passed mode operators and the 50/50 beam-splitter outputs, keeping
every propagation phase (L, L', x0, clock epochs), in extended precision.
"""
from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import quadrature
from .errors import EngineError, NonPositiveFrequency
from .model import MediumConfig, ProtocolConfig, dip_position

DIRECT_DPS = 60
START_LEVEL_GAUSSIAN = 3


def delta_kappa(medium: MediumConfig, chi, omega, omega0, *, chi_excess=None):
    """Net dispersion phase of the four medium segments at detected frequency ``omega``.

    Terms are summed in the order
    k_tS(w) - k_fI(w) + k_fI(2w0-w) - k_tS(2w0-w)
    + k_tI((2w0-w)/chi) - k_fS((2w0-w)/chi) + k_fS(w/chi) - k_tI(w/chi).

    Profiles are evaluated through their offset from the common center so
    that the mirror-image arguments are formed without rounding;
    ``chi_excess`` (chi - 1) may be passed for the same reason.
    """
    omega = np.asarray(omega, dtype=float)
    if chi_excess is None:
        chi_excess = chi - 1.0
    lo = omega
    hi = 2.0 * omega0 - omega
    if np.any(lo <= 0) or np.any(hi <= 0) or not chi > 0:
        raise NonPositiveFrequency("dispersion evaluated at a non-positive frequency")
    shift = omega0 - medium.center
    u = omega - omega0
    d_w = u + shift
    d_m = -u + shift
    # (w0 +- u)/chi - w0 = (+-u - w0 (chi - 1)) / chi
    d_w_chi = (u - omega0 * chi_excess) / chi + shift
    d_m_chi = (-u - omega0 * chi_excess) / chi + shift
    ktS, kfS, ktI, kfI = medium.profiles()
    return (ktS.at_offset(d_w) - kfI.at_offset(d_w)
            + kfI.at_offset(d_m) - ktS.at_offset(d_m)
            + ktI.at_offset(d_m_chi) - kfS.at_offset(d_m_chi)
            + kfS.at_offset(d_w_chi) - ktI.at_offset(d_w_chi))


def _delta_kappa_offsets(config: ProtocolConfig, u):
    if all(p.is_zero for p in config.medium.profiles()):
        return np.zeros_like(np.asarray(u, dtype=float))
    return delta_kappa(config.medium, config.chi, config.omega0 + np.asarray(u, dtype=float),
                       config.omega0, chi_excess=config.chi_excess)


def interference_phase(config: ProtocolConfig, u, dl):
    """Theta at offset ``u`` from omega0 and beam-splitter offset ``dl``."""
    u = np.asarray(u, dtype=float)
    return 2.0 * u * (dip_position(config) - dl) / config.c - _delta_kappa_offsets(config, u)


def _interference_phase_exact(config: ProtocolConfig, omega1, dl):
    """Theta in extended precision (call inside an mpmath precision context)."""
    mp = mpmath.mp
    c = mp.mpf(config.c)
    b = mp.mpf(config.v) / c
    chi = (1 + b) / (1 - b)
    w0 = mp.mpf(config.omega0)
    w = mp.mpf(omega1)
    wm = 2 * w0 - w
    tau = mp.mpf(config.t0b) - mp.mpf(config.t0a)
    ktS, kfS, ktI, kfI = config.medium.profiles()

    def k(profile, x):
        return profile.at_offset(x - mp.mpf(profile.center))

    dk = (k(ktS, w) - k(kfI, w) + k(kfI, wm) - k(ktS, wm)
          + k(ktI, wm / chi) - k(kfS, wm / chi) + k(kfS, w / chi) - k(ktI, w / chi))
    return 2 * (w - w0) * (4 * b / (1 + b) * tau - mp.mpf(dl) / c) - dk


def amplitude_collapsed(config: ProtocolConfig, omega1, dl, exact=False):
    """(1/2) phi(w1 - w0) [1 - exp(i Theta)], overall phase dropped.

    With ``exact=True`` (scalar input only) Theta is formed in extended
    precision; float64 loses about ulp(Theta) * cot(Theta/2) relative accuracy
    in |amplitude|^2 when Theta is large and close to a multiple of 2 pi.
    """
    if exact:
        w1 = float(omega1)
        if not (0 < w1 < 2.0 * config.omega0):
            raise NonPositiveFrequency("dispersion evaluated at a non-positive frequency")
        phi = math.sqrt(float(config.spectrum(w1 - config.omega0)))
        with mpmath.workdps(DIRECT_DPS):
            theta = _interference_phase_exact(config, w1, dl)
            return complex(mpmath.mpf(phi) * (1 - mpmath.expj(theta)) / 2)
    u = np.asarray(omega1, dtype=float) - config.omega0
    theta = interference_phase(config, u, dl)
    amp = 0.5 * np.sqrt(config.spectrum(u)) * (1.0 - np.exp(1j * theta))
    return amp if amp.ndim else complex(amp)


def _mode_phases(config: ProtocolConfig):
    """Phase exponents of the double-passed idler and signal operators (mpmath)."""
    mp = mpmath.mp
    c = mp.mpf(config.c)
    b = mp.mpf(config.v) / c
    chi = (1 + b) / (1 - b)
    t0a, t0b, x0 = mp.mpf(config.t0a), mp.mpf(config.t0b), mp.mpf(config.x0)
    L, Lp = mp.mpf(config.L), mp.mpf(config.L_prime)
    ktS, kfS, ktI, kfI = config.medium.profiles()
    boost = 2 * b / (1 + b)
    path = (L / chi + Lp) / c
    a_idler = boost * (t0a - t0b - x0 / c) - path
    a_signal = boost * (t0a - t0b + x0 / c) + path

    def k(profile, w):
        return profile.at_offset(w - mp.mpf(profile.center))

    def phase_idler(w):
        return -w * a_idler + k(ktI, w / chi) + k(kfI, w)

    def phase_signal(w):
        return w * a_signal + k(ktS, w) + k(kfS, w / chi)

    return phase_idler, phase_signal


def amplitude_direct(config: ProtocolConfig, omega1, dl):
    """On-shell <0|a1(w1) a2(w2)|psi> from the mode transforms, w2 = 2 w0 - w1.

    Output port 1 receives i a''_I e^{-i w dl/c} + a''_S, port 2 receives
    i a''_S + a''_I e^{-i w dl/c} (both over sqrt 2). Two pair histories
    contribute: idler at port 1 with signal at port 2, and the reverse.
    The frequency delta is stripped; the result is a Python complex.
    """
    w1f = float(omega1)
    if not (0 < w1f < 2.0 * config.omega0):
        raise NonPositiveFrequency("direct amplitude needs 0 < omega1 < 2 omega0")
    phi_1 = math.sqrt(float(config.spectrum(w1f - config.omega0)))
    with mpmath.workdps(DIRECT_DPS):
        mp = mpmath.mp
        c = mp.mpf(config.c)
        w0 = mp.mpf(config.omega0)
        w1 = mp.mpf(w1f)
        w2 = 2 * w0 - w1
        dlm = mp.mpf(dl)
        # second history draws the idler at w2: phi(w2 - w0) by the source state
        phi_2 = math.sqrt(float(config.spectrum(float(w2 - w0))))
        p_idler, p_signal = _mode_phases(config)
        # idler -> port 1, signal -> port 2: (i)(i)/2 = -1/2
        t1 = -mp.mpf(phi_1) * mp.expj(p_idler(w1) - w1 * dlm / c + p_signal(w2))
        # signal -> port 1, idler -> port 2: 1/2
        t2 = mp.mpf(phi_2) * mp.expj(p_signal(w1) + p_idler(w2) - w2 * dlm / c)
        amp = (t1 + t2) / 2
        return complex(amp)


def coincidence_rate_gaussian(delta_omega, dl, dl0, c=299792458.0):
    """Closed-form dip for a Gaussian spectrum of variance delta_omega**2."""
    x = (np.asarray(dl, dtype=float) - dl0) / c
    out = -np.expm1(-2.0 * delta_omega**2 * x**2)
    return out if out.ndim else float(out)


class _RateIntegrand:
    """Per-config cache of quadrature nodes, weighted densities and dkappa.

    The node set at a given refinement level does not depend on dl, so a
    scan reuses it across grid points. Cached arrays are computed once under
    a lock; values are identical whichever thread fills them.
    """

    def __init__(self, config: ProtocolConfig):
        self.config = config
        self.breakpoints = config.spectrum.breakpoints()
        self.start_level = START_LEVEL_GAUSSIAN if config.spectrum.kind == "gaussian" else 1
        self._levels = {}
        self._lock = threading.Lock()
        self._dl0 = dip_position(config)

    def level(self, lvl):
        got = self._levels.get(lvl)
        if got is None:
            with self._lock:
                got = self._levels.get(lvl)
                if got is None:
                    u, w = quadrature.composite_nodes(self.breakpoints, lvl)
                    wrho = w * self.config.spectrum(u)
                    dk = _delta_kappa_offsets(self.config, u)
                    got = (u, wrho, dk)
                    self._levels[lvl] = got
        return got

    def rate(self, dl):
        scale = 2.0 * (self._dl0 - dl) / self.config.c

        def at_level(lvl):
            u, wrho, dk = self.level(lvl)
            theta = u * scale - dk
            # 1 - cos = 2 sin^2(theta/2), accurate near the dip floor
            return np.dot(wrho, 2.0 * np.sin(0.5 * theta) ** 2)

        val, _ = quadrature.refine(at_level, start_level=self.start_level)
        return val


def coincidence_rate(config: ProtocolConfig, dl) -> float:
    """Relative coincidence rate at beam-splitter offset ``dl`` (baseline 1)."""
    return _RateIntegrand(config).rate(float(dl))


@dataclass(frozen=True)
class ScanGrid:
    dl_min: float
    dl_max: float
    n_points: int

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 3:
            raise ValueError("scan grid needs n_points >= 3")
        if not (math.isfinite(self.dl_min) and math.isfinite(self.dl_max)) or not self.dl_max > self.dl_min:
            raise ValueError("scan grid needs finite dl_min < dl_max")
        object.__setattr__(self, "n_points", int(self.n_points))

    def points(self) -> np.ndarray:
        return np.linspace(self.dl_min, self.dl_max, self.n_points)

    @property
    def spacing(self):
        return (self.dl_max - self.dl_min) / (self.n_points - 1)


@dataclass(frozen=True)
class ScanCurve:
    dl: np.ndarray
    p_c: np.ndarray
    config: ProtocolConfig | None = field(default=None, compare=False)

    def __post_init__(self):
        dl = np.array(self.dl, dtype=float)
        pc = np.array(self.p_c, dtype=float)
        if dl.shape != pc.shape or dl.ndim != 1:
            raise ValueError("dl and p_c must be 1-d arrays of equal length")
        dl.setflags(write=False)
        pc.setflags(write=False)
        object.__setattr__(self, "dl", dl)
        object.__setattr__(self, "p_c", pc)


def scan(config: ProtocolConfig, grid: ScanGrid, workers: int = 1) -> ScanCurve:
    """Coincidence rate at every grid point, ordered by grid index."""
    integrand = _RateIntegrand(config)
    xs = grid.points()

    def one(i):
        try:
            return integrand.rate(float(xs[i]))
        except EngineError as exc:
            raise type(exc)(f"grid index {i} (dl={xs[i]!r}): {exc}", index=i) from exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(one, range(len(xs))))
    else:
        values = [one(i) for i in range(len(xs))]
    return ScanCurve(xs, np.array(values), config)
