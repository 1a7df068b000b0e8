"""Reduced product of the cardinality, dependence and interval analyses.

Any subset of the three components may be enabled. With ``reduce`` on,
the interval component sharpens the others after each transfer:
cardinality rows are capped by interval sizes (``tocard``) and singleton
intervals yield dependences (``todep``). Expression evaluation is also
reduced, so a subexpression with a small interval counts as few values
even when its operands do not.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, replace

from .card import CardDomain, CardSet
from .dep import DepDomain, DepSet
from .engine import BaseDomain, Run, analyze
from .extnat import ExtNat
from .intervals import IntervalDomain, IntervalEnv, eval_interval, size, tocard, todep
from .lang import Command, Compare, Expr
from .lattice import SecurityLattice


@dataclass(frozen=True)
class ProductState:
    card: CardSet | None = None
    dep: DepSet | None = None
    itv: IntervalEnv | None = None


class ProductDomain(BaseDomain):
    def __init__(
        self,
        lattice: SecurityLattice,
        vars: Iterable[str],
        *,
        improved_guards: bool = False,
        reduce: bool = True,
    ):
        self.lattice = lattice
        self.vars = tuple(vars)
        self.reduce = reduce
        self.card_d = CardDomain(improved_guards)
        self.dep_d = DepDomain(lattice, self.vars, improved_guards)
        self.itv_d = IntervalDomain()

    # reduced expression evaluation, relative to the intervals of state s
    def _cap(self, s: ProductState):
        if not self.reduce or s.itv is None:
            return None
        env = s.itv

        def cap(e: Expr) -> ExtNat:
            return size(eval_interval(e, env))

        return cap

    def _single(self, s: ProductState):
        cap = self._cap(s)
        if cap is None:
            return None
        return lambda e: cap(e) <= 1

    def _reduced(self, s: ProductState) -> ProductState:
        if not self.reduce or s.itv is None:
            return s
        card = tocard(s.card, s.itv) if s.card is not None else None
        dep = todep(s.dep, s.itv, self.lattice) if s.dep is not None else None
        return ProductState(card, dep, s.itv)

    def assign(self, s: ProductState, x: str, e: Expr) -> ProductState:
        cap, single = self._cap(s), self._single(s)
        return self._reduced(
            ProductState(
                self.card_d.assign(s.card, x, e, cap) if s.card is not None else None,
                self.dep_d.assign(s.dep, x, e, single) if s.dep is not None else None,
                self.itv_d.assign(s.itv, x, e) if s.itv is not None else None,
            )
        )

    def refine(self, s: ProductState, b: Compare) -> ProductState:
        return self._reduced(
            ProductState(
                self.card_d.refine(s.card, b) if s.card is not None else None,
                self.dep_d.refine(s.dep, b) if s.dep is not None else None,
                self.itv_d.refine(s.itv, b) if s.itv is not None else None,
            )
        )

    def combine_if(self, b, before: ProductState, s1: ProductState, s2: ProductState, modified) -> ProductState:
        cap, single = self._cap(before), self._single(before)
        return self._reduced(
            ProductState(
                self.card_d.combine_if(b, before.card, s1.card, s2.card, modified, cap)
                if before.card is not None
                else None,
                self.dep_d.combine_if(b, before.dep, s1.dep, s2.dep, modified, single)
                if before.dep is not None
                else None,
                self.itv_d.combine_if(b, before.itv, s1.itv, s2.itv, modified) if before.itv is not None else None,
            )
        )

    def _pointwise(self, op: str, a: ProductState, b: ProductState) -> ProductState:
        return ProductState(
            getattr(self.card_d, op)(a.card, b.card) if a.card is not None else None,
            getattr(self.dep_d, op)(a.dep, b.dep) if a.dep is not None else None,
            getattr(self.itv_d, op)(a.itv, b.itv) if a.itv is not None else None,
        )

    # no reduction at the loop head, so the iteration stays monotone
    def join(self, a, b):
        return self._pointwise("join", a, b)

    def widen(self, old, new):
        return self._pointwise("widen", old, new)

    def narrow(self, head: ProductState, entry: ProductState, body) -> ProductState:
        if head.itv is None:
            return head
        itv = self.itv_d.narrow(head.itv, entry.itv, lambda h: body(replace(head, itv=h)).itv)
        return replace(head, itv=itv)


def product_run(
    c: Command,
    s0: ProductState,
    lattice: SecurityLattice,
    vars: Iterable[str],
    *,
    improved_guards: bool = False,
    reduce: bool = True,
) -> Run:
    d = ProductDomain(lattice, vars, improved_guards=improved_guards, reduce=reduce)
    return analyze(d, c, d._reduced(s0))
