#!/usr/bin/env python3
"""Fit the cost model M = alpha * (2K+n) * log2((K+n)/delta) to measured
operation counts of seeded random circuits over a (K, n) grid.

Two gate populations are fitted: a homogeneous H/T population (every gate has
the same per-iteration price, so a single slope describes the data well) and
a mixed population including CNOT (which compiles to three RUS stages and
inflates both the slope and the residuals).

Example:
    python scripts/cost_fit.py --circuits-per-point 3 --seed 11
"""
import argparse
import sys

from liftedqc.circuit import fit_cost_model, measure_cost_grid


def fit_population(name, gate_kinds, args):
    points = measure_cost_grid(
        ks=tuple(args.ks),
        ns=tuple(args.ns),
        delta=args.delta,
        seed=args.seed,
        circuits_per_point=args.circuits_per_point,
        variant=args.variant,
        gate_kinds=gate_kinds,
    )
    alpha, r2 = fit_cost_model(points)
    print(f"{name:>12}: alpha = {alpha:7.3f}   R^2 = {r2:.5f}   ({len(points)} circuits)")
    return alpha, r2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--ks", type=int, nargs="+", default=[5, 10, 20, 40])
    parser.add_argument("--ns", type=int, nargs="+", default=[1, 2, 3])
    parser.add_argument("--delta", type=float, default=0.01)
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--circuits-per-point", type=int, default=3,
                        dest="circuits_per_point")
    parser.add_argument("--variant", choices=("parity", "swap"), default="parity")
    args = parser.parse_args(argv)

    print(f"grid: K in {args.ks}, n in {args.ns}, delta = {args.delta}, "
          f"variant = {args.variant}\n")
    alpha, r2 = fit_population("H/T only", ("H", "T"), args)
    fit_population("H/T/CNOT", ("H", "T", "CNOT"), args)

    ok = 2.0 <= alpha <= 10.0 and r2 >= 0.95
    print(f"\nhomogeneous fit within gates (alpha in [2,10], R^2 >= 0.95): {ok}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
