"""Leakage bound of ``l := (h % k) + l`` against exhaustive evaluation, for several k."""

import argparse
import math

from hyperflow.card import initial_card, leakage_bits
from hyperflow.concrete import State, Trace, collect
from hyperflow.hyper import crdtr
from hyperflow.intervals import top_env
from hyperflow.lang import parse_program
from hyperflow.lattice import two_point
from hyperflow.product import ProductState, product_run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--hmax", type=int, default=8, help="h ranges over -hmax..hmax")
    args = ap.parse_args()
    lat = two_point()
    ctx = {"h": "H", "l": "L"}
    print(f"{'k':>4s} {'analysis':>9s} {'exact':>6s} {'bits':>6s}")
    for k in (1, 2, 3, 4, 8, -2):
        p = parse_program(f"l := (h % {k}) + l")
        s0 = ProductState(initial_card(lat, ctx, p.vars), None, top_env(p.vars))
        card = product_run(p.body, s0, lat, p.vars).final.card
        T = [Trace(s, s) for s in (State({"h": h, "l": l}) for h in range(-args.hmax, args.hmax + 1) for l in (0, 1))]
        exact = crdtr(collect(p.body, T), ctx, lat, p.vars)["L", "l"]
        bits = leakage_bits(card, "L", "l")
        shown = "inf" if bits == math.inf else f"{bits:.2f}"
        print(f"{k:4d} {card['L', 'l']:9} {exact:6d} {shown:>6s}")


if __name__ == "__main__":
    main()
