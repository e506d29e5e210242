import numpy as np

from clocksync import MediumConfig, ProtocolConfig, SpectralDensity

OMEGA0 = 1.0e16
DW = 1.0e15


def dip_config(v=50.0, tau=1e-9, medium=None, **kw):
    return ProtocolConfig(omega0=OMEGA0, v=v, t0a=0.0, t0b=tau,
                          spectrum=SpectralDensity.gaussian(DW), medium=medium, **kw)


def random_coeffs(rng, degree=6, scale=1e3, dw=DW):
    """Coefficients with c_k in +-scale / dw**k, so each order contributes ~scale rad at one bandwidth."""
    return [float(rng.uniform(-scale, scale) / dw**k) for k in range(degree + 1)]


def random_matched_medium(rng, center=OMEGA0, degree=6, scale=1e3):
    return MediumConfig.matched(center, random_coeffs(rng, degree, scale), random_coeffs(rng, degree, scale))
