"""Dispersion cancellation: matched media leave the dip untouched, a mismatch does not.

Even-order mismatch in one leg cancels; odd orders broaden the dip.
"""
import numpy as np

from clocksync import MediumConfig, ProtocolConfig, ScanGrid, SpectralDensity, locate_dip, scan

W0, DW = 1e16, 1e15
GRID = ScanGrid(-3e-6, 3e-6, 401)


def run(medium):
    cfg = ProtocolConfig(omega0=W0, v=50.0, t0a=0.0, t0b=1e-9, spectrum=SpectralDensity.gaussian(DW), medium=medium)
    return locate_dip(scan(cfg, GRID))


def main():
    rng = np.random.default_rng(3)
    coeffs = [rng.uniform(-1, 1, 7) * 1e3 / DW ** np.arange(7) for _ in range(2)]
    cases = {
        "vacuum": MediumConfig.vacuum(W0),
        "matched, degree 6": MediumConfig.matched(W0, *coeffs),
        "c2 mismatch": MediumConfig.from_coeffs(W0, [0, 0, 5e-29], [], [], []),
        "c3 mismatch": MediumConfig.from_coeffs(W0, [0, 0, 0, 3e-46], [], [], []),
    }
    print(f"{'medium':20s} {'tau_hat (s)':>14s} {'half-width (m)':>15s}")
    for name, med in cases.items():
        r = run(med)
        print(f"{name:20s} {r.tau_hat:14.6e} {r.width_hat:15.6e}")


if __name__ == "__main__":
    main()
