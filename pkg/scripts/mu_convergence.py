#!/usr/bin/env python3
"""Chemical potential against N above and below the critical density.

    python scripts/mu_convergence.py --sizes 1000 10000 100000 --R 10
"""
import argparse

from lsbec.experiments import run_mu_convergence
from lsbec.ids import InfiniteGammaReference, build_reference, critical_density, solve_mu_hat
from lsbec.sampler import ModelParameters


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1000, 10_000, 100_000])
    ap.add_argument("--R", type=int, default=10)
    ap.add_argument("--gamma", type=float, default=5.0)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--workers", type=int, default=0)
    args = ap.parse_args()

    rho_hat = critical_density(InfiniteGammaReference(1.0), 1.0).value
    ref = build_reference(ModelParameters(1.0, args.gamma, 1.0, 1.0, 1), "ensemble",
                          box_length=2e5, R=20, seed=101, workers=args.workers)
    mu_hat = solve_mu_hat(0.5 * rho_hat, 1.0, ref)
    for factor in (2.0, 0.5):
        p = ModelParameters(1.0, args.gamma, 1.0, factor * rho_hat, args.sizes[0])
        rep = run_mu_convergence(p, args.sizes, args.R, seed=args.seed, rho_c=rho_hat,
                                 mu_hat=mu_hat if factor < 1 else None, workers=args.workers)
        print(f"# rho = {factor:g} x {rho_hat:.5f}")
        for row in rep.rows:
            if row.statistic in ("mu_mean", "abs_mu_mean", "abs(mu_mean-mu_hat)", "n1_over_N_median"):
                print(f"{row.N},{row.statistic},{row.value:.6g},{row.stderr:.2g}")


if __name__ == "__main__":
    main()
