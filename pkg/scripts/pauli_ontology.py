"""Walk the sigma_x automaton and print each slice with its basis classification."""

import argparse

from hamca import ca_engine as ca
from hamca.exact_core import GaussMatrix, GaussVector
from hamca.spectral import detect_cycle, ontology_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=13)
    ap.add_argument("--psi1", default="0,1", help="comma separated Gaussian integers, e.g. 1,0")
    args = ap.parse_args()

    H = GaussMatrix.of([[0, 1], [1, 0]])
    p0 = GaussVector.of([1, 0])
    p1 = GaussVector.of(args.psi1.split(","))
    hist = ca.evolve(p0, p1, H, args.steps)
    basis = [GaussVector.basis(2, 0), GaussVector.basis(2, 1)]
    scan = ontology_scan(hist, basis)
    sup = set(scan.superposition_indices)
    for n, psi in enumerate(hist.states):
        tag = "superposition" if n in sup else "basis multiple"
        print(f"{n:3d}  {', '.join(psi.to_strings()):>16s}  {tag}")
    cyc = detect_cycle(p0, p1, H, 1000)
    print(f"antiperiod={cyc.antiperiod} period={cyc.period} ontological={scan.ontological}")


if __name__ == "__main__":
    main()
