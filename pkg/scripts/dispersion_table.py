"""Exact dispersion l E = arcsin(l eps / 2) against its small-l eps series."""

import argparse
import math

import numpy as np

from hamca.continuum_bridge import dispersion, dispersion_series


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--step", type=float, default=0.25)
    args = ap.parse_args()

    print(f"{'l eps':>7s} {'l E':>12s} {'series':>12s} {'diff':>10s} {'naive l eps/2':>14s}")
    for le in np.arange(-2.0, 2.0 + 1e-12, args.step):
        le = float(round(le, 12))
        E = dispersion(le)
        print(f"{le:7.3f} {E:12.8f} {dispersion_series(le):12.8f} {E - dispersion_series(le):10.2e} {le / 2:14.8f}")
    print(f"band edge: pi/2 = {math.pi / 2:.8f}")


if __name__ == "__main__":
    main()
