"""``hyperflow`` command-line driver."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .card import Verdict
from .concrete import DEFAULT_FUEL
from .gen import GenConfig
from .lang import ParseError, format_command, parse_program
from .lattice import Config, LatticeError, parse_config
from .oracle import ALL_VARIANTS, check_program, random_suite
from .report import AnalysisConfig, SRQuery, analyze, annotate, embedded_config, format_text, to_record

log = logging.getLogger("hyperflow")


def _values(text: str) -> tuple[int, ...]:
    try:
        lo, hi = (int(s) for s in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected <lo>..<hi>, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty value range {text!r}")
    return tuple(range(lo, hi + 1))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperflow", description="Dependence and cardinality information-flow analysis.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="analyse a program")
    a.add_argument("file", type=Path)
    a.add_argument("--dep", action="store_true", help="dependence analysis")
    a.add_argument("--card", action="store_true", help="cardinality analysis (default if nothing selected)")
    a.add_argument("--intervals", action="store_true", help="interval analysis")
    a.add_argument("--improved-guards", action="store_true", help="refine on x1 == x2 guards")
    a.add_argument("--product", action="store_true", help="reduce with intervals (implies --intervals)")
    a.add_argument("--hs", action="store_true", help="flow-sensitive security typing")
    a.add_argument("--check", action="append", default=[], metavar="'SR L K X'", help="security requirement")
    a.add_argument("--strict", action="store_true", help="exit 2 if a requirement is UNKNOWN")
    a.add_argument("--annotate", action="store_true", help="print the source with constraint comments")
    _common(a)

    o = sub.add_parser("oracle", help="check the analyses against exhaustive execution")
    o.add_argument("file", type=Path, nargs="?")
    o.add_argument("--values", type=_values, default=(0, 1, 2), metavar="LO..HI")
    o.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    o.add_argument("--random", type=int, default=0, metavar="N", help="also check N random programs")
    o.add_argument("--seed", type=int, default=0)
    _common(o)
    return p


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="lattice/context file")
    p.add_argument("--format", choices=("text", "structured"), default="text")


def _load(args) -> tuple[str, object, Config]:
    source = args.file.read_text()
    program = parse_program(source)
    cfg = embedded_config(source)
    if args.config is None:
        return source, program, cfg
    merged = parse_config(args.config.read_text())
    if cfg.lattice is not None or cfg.universal:
        if merged.lattice is not None or merged.universal:
            log.warning("embedded lattice overrides --config")
        merged.lattice, merged.universal = cfg.lattice, cfg.universal
    for x, l in cfg.context.items():
        if merged.context.get(x, l) != l:
            log.warning("embedded context for %s overrides --config", x)
        merged.context[x] = l
    return source, program, merged


def cmd_analyze(args) -> int:
    source, program, cfg = _load(args)
    lattice, context = cfg.resolve(program.vars)
    acfg = AnalysisConfig(
        dep=args.dep,
        card=args.card or not (args.dep or args.intervals or args.hs),
        intervals=args.intervals,
        improved_guards=args.improved_guards,
        product=args.product,
        hs=args.hs,
        checks=[SRQuery.parse(q) for q in args.check],
    )
    rep = analyze(program, lattice, context, acfg)
    if args.annotate:
        sys.stdout.write(annotate(source, rep))
        if not source.endswith("\n"):
            sys.stdout.write("\n")
    elif args.format == "structured":
        print(json.dumps(to_record(rep), indent=2, ensure_ascii=False))
    else:
        sys.stdout.write(format_text(rep))
    if args.strict and any(v is Verdict.UNKNOWN for _, v in rep.verdicts):
        return 2
    return 0


def cmd_oracle(args) -> int:
    if args.file is None and not args.random:
        raise ValueError("oracle needs a FILE or --random N")
    records = []
    failed = 0
    if args.file is not None:
        _, program, cfg = _load(args)
        lattice, context = cfg.resolve(program.vars)
        results = check_program(program.body, program.vars, lattice, context, args.values, args.fuel)
        failed += sum(not r.ok for r in results)
        records.append((str(args.file), results))
    if args.random:
        # random programs are only kept if they terminate within the fuel
        fuel = min(args.fuel, 1000)
        for i, (c, _, _, _, results) in enumerate(
            random_suite(args.random, args.seed, args.values, fuel, GenConfig(), ALL_VARIANTS)
        ):
            failed += sum(not r.ok for r in results)
            records.append((f"random#{i}", results))
            if any(not r.ok for r in results):
                log.error("unsound on:\n%s", format_command(c))
    if args.format == "structured":
        out = [
            {"program": name, "variant": str(r.variant), "ok": r.ok, "detail": r.describe()}
            for name, results in records
            for r in results
        ]
        print(json.dumps({"failed": failed, "results": out}, indent=2, ensure_ascii=False))
    else:
        for name, results in records:
            for r in results:
                if args.file is not None and name == str(args.file) or not r.ok:
                    print(f"{name}: {r.describe()}")
        total = sum(len(rs) for _, rs in records)
        print(f"{'PASS' if failed == 0 else 'FAIL'}: {total - failed}/{total} checks sound")
    return 0 if failed == 0 else 1


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            return cmd_analyze(args)
        return cmd_oracle(args)
    except ParseError as e:
        print(f"{args.file}:{e}", file=sys.stderr)
    except (LatticeError, ValueError, OSError) as e:
        print(f"hyperflow: error: {e}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
