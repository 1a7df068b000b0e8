"""Cardinality constraints ``l▸x:n`` and the cardinality analysis.

``l▸x:n`` reads: traces agreeing initially on every input of level at most
``l`` end with at most ``n`` distinct values of ``x``. A :class:`CardSet`
holds exactly one bound per (level, variable).
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Mapping
from enum import Enum

from . import extnat
from .dep import DepSet, close, equality_operands
from .engine import BaseDomain, Run, analyze
from .extnat import INF, ExtNat
from .lang import Command, Compare, Expr, IntLit, Var
from .lattice import Level, SecurityLattice


class ShapeError(ValueError):
    pass


class CardSet(Mapping):
    """Total map ``(level, var) -> [0..∞]``; immutable."""

    __slots__ = ("levels", "vars", "_rows")

    def __init__(self, levels: Iterable[Level], vars: Iterable[str], rows: Mapping[tuple[Level, str], ExtNat]):
        self.levels = tuple(levels)
        self.vars = tuple(vars)
        self._rows = {(l, x): rows[l, x] for l in self.levels for x in self.vars}

    @classmethod
    def constant(cls, levels, vars, n: ExtNat) -> "CardSet":
        levels, vars = tuple(levels), tuple(vars)
        return cls(levels, vars, {(l, x): n for l in levels for x in vars})

    def __getitem__(self, key: tuple[Level, str]) -> ExtNat:
        return self._rows[key]

    def __iter__(self):
        return iter(self._rows)

    def __len__(self) -> int:
        return len(self._rows)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CardSet):
            return self._rows == other._rows
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def replace(self, updates: Mapping[tuple[Level, str], ExtNat]) -> "CardSet":
        rows = dict(self._rows)
        rows.update(updates)
        return CardSet(self.levels, self.vars, rows)

    def map(self, f) -> "CardSet":
        return CardSet(self.levels, self.vars, {k: f(k, n) for k, n in self._rows.items()})

    def at(self, l: Level) -> dict[str, ExtNat]:
        return {x: self._rows[l, x] for x in self.vars}

    def same_shape(self, other: "CardSet") -> bool:
        return set(self._rows) == set(other._rows)

    def __repr__(self) -> str:
        items = ", ".join(f"{l}▸{x}:{extnat.fmt(n)}" for (l, x), n in self._rows.items())
        return "{" + items + "}"


def _check(c1: CardSet, c2: CardSet) -> None:
    if not c1.same_shape(c2):
        raise ShapeError("cardinality sets over different levels or variables")


def card_order(c1: CardSet, c2: CardSet) -> bool:
    _check(c1, c2)
    return all(c1[k] <= c2[k] for k in c1)


def card_join(c1: CardSet, c2: CardSet) -> CardSet:
    _check(c1, c2)
    return c1.map(lambda k, n: max(n, c2[k]))


def widen_value(n1: ExtNat, n2: ExtNat) -> ExtNat:
    return n1 if n2 <= n1 else INF


def widen(c1: CardSet, c2: CardSet) -> CardSet:
    _check(c1, c2)
    return c1.map(lambda k, n: widen_value(n, c2[k]))


def card_expr(e: Expr, l: Level, c: CardSet, cap: Callable[[Expr], ExtNat] | None = None) -> ExtNat:
    """Bound on the number of values ``e`` takes among ``l``-equivalent traces.

    ``cap``, when given, bounds every subexpression independently (e.g. by
    the size of its interval) and is applied bottom-up.
    """
    if isinstance(e, IntLit):
        n = 1
    elif isinstance(e, Var):
        n = c[l, e.name]
    else:
        n = extnat.mul(card_expr(e.lhs, l, c, cap), card_expr(e.rhs, l, c, cap))
        if isinstance(e, Compare):
            n = min(2, n)
    return n if cap is None else min(n, cap(e))


def card_sum_combine(c1: CardSet, c2: CardSet, modified: frozenset[str], ref: CardSet) -> CardSet:
    """Rows of ``modified`` variables add up; the others are taken from ``ref``."""
    _check(c1, c2)
    return ref.map(lambda k, n: extnat.add(c1[k], c2[k]) if k[1] in modified else n)


def card_guard_refine(b: Compare, c: CardSet) -> CardSet:
    """Under ``x1 == x2`` both operands have at most the smaller variety."""
    ops = equality_operands(b)
    if ops is None:
        return c
    x1, x2 = ops
    updates = {}
    for l in c.levels:
        m = min(c[l, x1], c[l, x2])
        updates[l, x1] = m
        updates[l, x2] = m
    return c.replace(updates)


def initial_card(
    lattice: SecurityLattice, context: Mapping[str, Level], vars: Iterable[str], range_size: ExtNat = INF
) -> CardSet:
    """``l▸x:1`` when ``Γ(x) ⊑ l``, otherwise ``range_size`` (∞ when unbounded)."""
    vars = tuple(vars)
    return CardSet(
        lattice.levels,
        vars,
        {(l, x): 1 if lattice.leq(context[x], l) else range_size for l in lattice.levels for x in vars},
    )


def bottom_card(levels, vars) -> CardSet:
    return CardSet.constant(levels, vars, 0)


class CardDomain(BaseDomain):
    def __init__(self, improved_guards: bool = False):
        self.improved_guards = improved_guards

    def assign(self, c: CardSet, x: str, e: Expr, cap=None) -> CardSet:
        return c.replace({(l, x): card_expr(e, l, c, cap) for l in c.levels})

    def refine(self, c: CardSet, b: Compare) -> CardSet:
        return card_guard_refine(b, c) if self.improved_guards else c

    def combine_if(self, b, before, c1, c2, modified, cap=None):
        rows = {}
        for l in before.levels:
            agreed = card_expr(b, l, before, cap) <= 1
            for x in before.vars:
                k = (l, x)
                if agreed:
                    rows[k] = max(c1[k], c2[k])
                elif x in modified:
                    rows[k] = extnat.add(c1[k], c2[k])
                else:
                    rows[k] = before[k]
        return CardSet(before.levels, before.vars, rows)

    def join(self, a, b):
        return card_join(a, b)

    def widen(self, old, new):
        return widen(old, new)


def card_run(c: Command, c0: CardSet, *, improved_guards: bool = False) -> Run:
    return analyze(CardDomain(improved_guards), c, c0)


def card_analyze(c: Command, c0: CardSet, *, improved_guards: bool = False) -> CardSet:
    return card_run(c, c0, improved_guards=improved_guards).final


# --------------------------------------------------------------------------
# cardinalities vs dependences, leakage, security requirements
# --------------------------------------------------------------------------


def to_dep(c: CardSet) -> DepSet:
    """Keep exactly the constraints whose bound is at most one value."""
    return frozenset(k for k, n in c.items() if n <= 1)


def from_dep(d: DepSet, levels: Iterable[Level], vars: Iterable[str]) -> CardSet:
    levels, vars = tuple(levels), tuple(vars)
    return CardSet(levels, vars, {(l, x): 1 if (l, x) in d else INF for l in levels for x in vars})


def leakage_bits(c: CardSet, l: Level, x: str) -> float | None:
    """Min-capacity bound in bits; ``None`` when the row is 0 (unreachable)."""
    n = c[l, x]
    if n == 0:
        return None
    if n == INF:
        return INF
    return math.log2(n)


class Verdict(str, Enum):
    SATISFIED = "SATISFIED"
    UNKNOWN = "UNKNOWN"


def check_sr(c: CardSet, l: Level, k: ExtNat, x: str) -> Verdict:
    if k < 1:
        raise ValueError("SR bound k must be at least 1")
    return Verdict.SATISFIED if c[l, x] <= k else Verdict.UNKNOWN


def dep_consistent(c: CardSet, d: DepSet, lattice: SecurityLattice) -> bool:
    """Every dependence in ``d`` is also implied by the cardinalities ``c``."""
    return close(d, lattice) <= to_dep(c)
