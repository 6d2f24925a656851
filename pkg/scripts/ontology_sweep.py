"""How often do random integer automata stay inside basis multiples?

For each dimension, random admissible H and random basis-state initial data are
evolved; runs are classified as ontological or as passing through a superposition.
This is an empirical look only; nothing is asserted.
"""

import argparse

from hamca.exact_core import GaussVector
from hamca.random_models import make_rng, random_admissible
from hamca.spectral import evolve_and_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 3, 4, 6, 8])
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--steps", type=int, default=60)
    args = ap.parse_args()

    print(f"{'dim':>4s} {'runs':>5s} {'ontological':>12s} {'median first superposition':>28s}")
    for d in args.dims:
        onto, firsts = 0, []
        for j in range(args.runs):
            r = make_rng(args.seed, d, j)
            H = random_admissible(r, d)
            a, b = (int(x) for x in r.integers(0, d, size=2))
            rep = evolve_and_scan(GaussVector.basis(d, a), GaussVector.basis(d, b), H, args.steps)
            if rep.ontological:
                onto += 1
            else:
                firsts.append(rep.first_superposition_index)
        firsts.sort()
        med = firsts[len(firsts) // 2] if firsts else "-"
        print(f"{d:4d} {args.runs:5d} {onto:12d} {med!s:>28s}")


if __name__ == "__main__":
    main()
