"""Timing error budget over a grid of bandwidths and velocity uncertainties."""
import argparse

import numpy as np

from clocksync import error_budget


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--v", type=float, default=500.0)
    ap.add_argument("--tau", type=float, default=1e-9)
    args = ap.parse_args()
    bandwidths = [1e13, 1e14, 1e15, 1e16]
    rel_dv = [0.0, 0.01, 0.1]
    print("delta_omega,delta_v_over_v,delta_tau_s,term_dip_s,term_velocity_s")
    for dw in bandwidths:
        for r in rel_dv:
            b = error_budget(dw, args.v, r * args.v, args.tau)
            print(f"{dw:.3g},{r:g},{b.delta_tau:.6e},{b.term_dip:.6e},{b.term_velocity:.6e}")
    # dip term scales as 1/(delta_omega v)
    d = [error_budget(dw, args.v, 0.0, args.tau).term_dip for dw in bandwidths]
    assert np.allclose(np.array(d) * np.array(bandwidths), d[0] * bandwidths[0])


if __name__ == "__main__":
    main()
