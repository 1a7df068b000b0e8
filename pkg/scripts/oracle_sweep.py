"""Soundness and precision of the analyses on random programs.

For every variant, counts unsound results (should be zero) and measures
how often each cardinality row equals the exact value computed from the
collected traces.
"""

import argparse
import random
import time
from collections import Counter

from hyperflow.card import initial_card
from hyperflow.concrete import collect, initial_traces
from hyperflow.dep import initial_dep
from hyperflow.gen import GenConfig, random_context, random_lattice, random_program
from hyperflow.hyper import crdtr, deptr
from hyperflow.intervals import range_env
from hyperflow.oracle import ALL_VARIANTS
from hyperflow.product import ProductState, product_run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--values", type=int, default=3, help="values 0..N-1")
    ap.add_argument("--fuel", type=int, default=200)
    args = ap.parse_args()

    values = tuple(range(args.values))
    rng = random.Random(args.seed)
    unsound = Counter()
    exact_rows, rows = Counter(), Counter()
    exact_deps, true_deps = Counter(), Counter()
    t0 = time.time()
    for _ in range(args.n):
        c, vars = random_program(rng, GenConfig(depth=args.depth), values, args.fuel)
        lat = random_lattice(rng)
        ctx = random_context(rng, lat, vars)
        T = collect(c, initial_traces(vars, values), args.fuel)
        tc, td = crdtr(T, ctx, lat, vars), deptr(T, ctx, lat, vars)
        for v in ALL_VARIANTS:
            s0 = ProductState(
                initial_card(lat, ctx, vars, range_size=len(values)),
                initial_dep(lat, ctx, vars),
                range_env(vars, values[0], values[-1]) if v.product else None,
            )
            out = product_run(c, s0, lat, vars, improved_guards=v.improved_guards, reduce=v.product).final
            key = str(v)
            if any(tc[k] > out.card[k] for k in tc) or not out.dep <= td:
                unsound[key] += 1
            rows[key] += len(tc)
            exact_rows[key] += sum(tc[k] == out.card[k] for k in tc)
            true_deps[key] += len(td)
            exact_deps[key] += len(out.dep)
    print(f"{args.n} programs, values {values}, {time.time() - t0:.1f}s")
    print(f"{'variant':34s} {'unsound':>7s} {'exact card rows':>16s} {'deps found':>11s}")
    for v in ALL_VARIANTS:
        k = str(v)
        print(
            f"{k:34s} {unsound[k]:7d} {exact_rows[k] / rows[k]:15.1%} {exact_deps[k] / max(true_deps[k], 1):10.1%}"
        )


if __name__ == "__main__":
    main()
