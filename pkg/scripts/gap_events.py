#!/usr/bin/env python3
"""Frequencies of the low-ground-state and spectral-gap events against N.

    python scripts/gap_events.py --gamma 1e8 --sizes 1000 10000 100000 --R 200
"""
import argparse

from lsbec.experiments import TheoremConstants, run_gap_experiment
from lsbec.sampler import ModelParameters


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gamma", type=float, default=1e8)
    ap.add_argument("--rho", type=float, default=1.0)
    ap.add_argument("--sizes", type=int, nargs="+", default=[1000, 10_000, 100_000])
    ap.add_argument("--R", type=int, default=200)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--workers", type=int, default=0)
    args = ap.parse_args()
    p = ModelParameters(1.0, args.gamma, 1.0, args.rho, args.sizes[0])
    rep = run_gap_experiment(p, TheoremConstants(), args.sizes, args.R, seed=args.seed,
                             workers=args.workers)
    print(rep.csv_body(), end="")


if __name__ == "__main__":
    main()
