"""Soundness checks of the analyses against the exhaustive concrete semantics."""

from __future__ import annotations

import random
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .card import initial_card
from .concrete import DEFAULT_FUEL, collect, initial_traces
from .dep import initial_dep
from .gen import GenConfig, random_context, random_lattice, random_program
from .hyper import crdtr, deptr
from .intervals import range_env
from .lang import Command
from .lattice import Level, SecurityLattice
from .product import ProductState, product_run


@dataclass(frozen=True)
class Variant:
    improved_guards: bool
    product: bool

    def __str__(self) -> str:
        return f"improved={'on' if self.improved_guards else 'off'},product={'on' if self.product else 'off'}"


ALL_VARIANTS = tuple(Variant(i, p) for i in (False, True) for p in (False, True))


@dataclass
class OracleResult:
    variant: Variant
    card_violations: list[tuple[Level, str, int, object]] = field(default_factory=list)
    dep_violations: list[tuple[Level, str]] = field(default_factory=list)
    interval_violations: list[tuple[str, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.card_violations or self.dep_violations or self.interval_violations)

    def describe(self) -> str:
        if self.ok:
            return f"PASS [{self.variant}]"
        parts = [f"card {l}▸{x}: true {n} > claimed {m}" for l, x, n, m in self.card_violations]
        parts += [f"dep {l}▸{x} claimed but false" for l, x in self.dep_violations]
        parts += [f"interval of {x} misses {v}" for x, v in self.interval_violations]
        return f"FAIL [{self.variant}] " + "; ".join(parts)


def check_program(
    c: Command,
    vars: Iterable[str],
    lattice: SecurityLattice,
    context: Mapping[str, Level],
    values: Iterable[int] = (0, 1, 2),
    fuel: int = DEFAULT_FUEL,
    variants: Iterable[Variant] = ALL_VARIANTS,
) -> list[OracleResult]:
    """Compare the analyses against ``crdtr``/``deptr`` of the collected traces.

    Initial cardinalities are range-aware: ``|values|`` for variables not
    visible at a level. Intervals start at the hull of ``values``.
    """
    vars = tuple(vars)
    values = tuple(sorted(set(values)))
    T = collect(c, initial_traces(vars, values), fuel)
    true_card = crdtr(T, context, lattice, vars)
    true_dep = deptr(T, context, lattice, vars)
    finals = {x: {t.final[x] for t in T} for x in vars}
    s0 = ProductState(
        initial_card(lattice, context, vars, range_size=len(values)),
        initial_dep(lattice, context, vars),
        range_env(vars, values[0], values[-1]) if values else None,
    )
    out = []
    for v in variants:
        s = s0 if v.product else ProductState(s0.card, s0.dep, None)
        final = product_run(c, s, lattice, vars, improved_guards=v.improved_guards, reduce=v.product).final
        r = OracleResult(v)
        for k in final.card:
            if true_card[k] > final.card[k]:
                r.card_violations.append((k[0], k[1], true_card[k], final.card[k]))
        r.dep_violations = sorted(final.dep - true_dep)
        if final.itv is not None:
            r.interval_violations = [(x, val) for x in vars for val in sorted(finals[x]) if val not in final.itv[x]]
        out.append(r)
    return out


def random_suite(
    n: int,
    seed: int = 0,
    values: tuple[int, ...] = (0, 1, 2),
    fuel: int = 200,
    cfg: GenConfig | None = None,
    variants: Iterable[Variant] = ALL_VARIANTS,
):
    """Yield ``(program, vars, lattice, context, results)`` for ``n`` random cases."""
    rng = random.Random(seed)
    variants = tuple(variants)
    for _ in range(n):
        c, vars = random_program(rng, cfg, values, fuel)
        lat = random_lattice(rng)
        ctx = random_context(rng, lat, vars)
        yield c, vars, lat, ctx, check_program(c, vars, lat, ctx, values, fuel, variants)
