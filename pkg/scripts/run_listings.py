"""Final L-level cardinalities of every bundled listing under each analysis variant."""

import argparse

from hyperflow import listing
from hyperflow.extnat import fmt
from hyperflow.lang import parse_program
from hyperflow.report import AnalysisConfig, analyze, embedded_config

NAMES = ("listing1", "listing2", "listing4", "listing5", "listing6", "mincap", "stress")
VARIANTS = {
    "plain": AnalysisConfig(card=True),
    "improved": AnalysisConfig(card=True, improved_guards=True),
    "product": AnalysisConfig(card=True, dep=True, improved_guards=True, product=True),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--level", default="L")
    args = ap.parse_args()
    for name in NAMES:
        src = listing(name)
        p = parse_program(src)
        lat, ctx = embedded_config(src).resolve(p.vars)
        print(f"{name}:")
        for label, cfg in VARIANTS.items():
            card = analyze(p, lat, ctx, cfg).final.card
            row = ", ".join(f"{x}:{fmt(card[args.level, x])}" for x in sorted(p.vars))
            print(f"  {label:9s} {row}")


if __name__ == "__main__":
    main()
