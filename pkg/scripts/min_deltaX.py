"""Constrained minimum Delta X for each candidate uncertainty bound, plus the wide-Gaussian limit."""

import argparse
import json

from hamca.uncertainty import LatticeState, min_deltaX_search, uncertainty_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--l", type=float, default=1.0)
    ap.add_argument("--R", type=int, default=8)
    ap.add_argument("--family", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--json", action="store_true", help="print full JSON records")
    args = ap.parse_args()

    for bound in ("paper", "scaled", "shift"):
        res = min_deltaX_search(args.l, args.R, args.family, bound)
        if args.json:
            print(json.dumps(res.to_json(), indent=1))
            continue
        dx = "none feasible" if res.dX_min is None else f"{res.dX_min:.6f} on {res.family} sites"
        print(f"{bound:>7s}: dX_min = {dx}  (target l/sqrt2 = {res.target:.6f})")

    print("\nwide Gaussians (continuum regime):")
    for sigma in (2.0, 5.0, 10.0, 20.0, 40.0):
        rep = uncertainty_report(LatticeState.gaussian(int(12 * sigma / args.l), sigma, args.l))
        print(f"  sigma={sigma:5.1f}  dX dP={rep.product:.6f}  robertson={rep.robertson_rhs:.6f}  "
              f"printed={rep.paper_rhs:.6f}  halved={rep.scaled_rhs:.6f}  shift={rep.shift_rhs:.6f}")


if __name__ == "__main__":
    main()
