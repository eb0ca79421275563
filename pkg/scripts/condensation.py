#!/usr/bin/env python3
"""Supercritical condensate fraction at twice the finite-volume critical density.

The critical density of a box of N / rho is estimated as
L^-1 sum_{j>=2} B(E_j - E_1), iterated to the fixed point rho = 2 rho_c,
and a condensation run is made at that density.

    python scripts/condensation.py --N 100000 --R 100 --out bec.csv
"""
import argparse

from lsbec.experiments import TheoremConstants, run_bec_experiment, self_consistent_density
from lsbec.ids import InfiniteGammaReference, critical_density
from lsbec.sampler import ModelParameters


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=100_000)
    ap.add_argument("--R", type=int, default=100)
    ap.add_argument("--R-critical", type=int, default=12)
    ap.add_argument("--gamma", type=float, default=5.0)
    ap.add_argument("--seed", type=int, default=9)
    ap.add_argument("--workers", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    start = 2 * critical_density(InfiniteGammaReference(1.0), 1.0).value
    p = ModelParameters(1.0, args.gamma, 1.0, start, args.N)
    sc = self_consistent_density(p, 2.0, args.R_critical, seed=5, iterations=3,
                                 workers=args.workers)
    for h in sc["history"]:
        print(f"# rho {h['rho']:.5f} -> rho_c {h['rho_c']:.5f} +- {h['stderr']:.5f}")
    p = ModelParameters(1.0, args.gamma, 1.0, sc["rho"], args.N)
    rep = run_bec_experiment(p, [args.N], args.R, seed=args.seed, rho_c=sc["rho_c"],
                             constants=TheoremConstants(), eta_prime=0.01, workers=args.workers)
    text = rep.to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(text, end="")


if __name__ == "__main__":
    main()
