"""Executable hypercollecting semantics and the set-of-sets abstractions.

Everything here is exponential and meant for oracle-scale inputs only.
Concretisation maps are exposed as membership predicates.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping

from .card import CardSet
from .concrete import DEFAULT_FUEL, FuelExhausted, Trace, collect, eval_in, guard_filter
from .dep import DepSet
from .lang import Assign, Command, Compare, Expr, If, Seq, Skip, Var, While, negate
from .lattice import Level, SecurityLattice

HyperSet = frozenset  # frozenset[frozenset[Trace]]
ValueSetSet = frozenset  # frozenset[frozenset[int]]


def guard_hyper(b: Compare, TT: Iterable[frozenset]) -> HyperSet:
    return frozenset(guard_filter(b, T) for T in TT)


def _if_image(b: Compare, c1: Command, c2: Command, T: frozenset, fuel: int) -> frozenset:
    return collect(c1, guard_filter(b, T), fuel) | collect(c2, guard_filter(negate(b), T), fuel)


def hyper_collect(c: Command, TT: Iterable[frozenset], fuel: int = DEFAULT_FUEL) -> HyperSet:
    """Hypercollecting semantics; loops iterate at most ``fuel`` times.

    Raises :class:`FuelExhausted` when a loop fixpoint is not reached.
    """
    TT = frozenset(TT)
    if isinstance(c, Skip):
        return TT
    if isinstance(c, Assign):
        return frozenset(collect(c, T, fuel) for T in TT)
    if isinstance(c, Seq):
        return hyper_collect(c.second, hyper_collect(c.first, TT, fuel), fuel)
    if isinstance(c, If):
        return frozenset(_if_image(c.guard, c.then_branch, c.else_branch, T, fuel) for T in TT)
    if isinstance(c, While):
        # lfp above TT of X ↦ X ∪ {unroll(T) | T ∈ X}; the step is elementwise
        skip = Skip()
        reached, frontier = set(TT), set(TT)
        for _ in range(fuel + 1):
            new = {_if_image(c.guard, c.body, skip, T, fuel) for T in frontier} - reached
            if not new:
                return guard_hyper(negate(c.guard), reached)
            reached |= new
            frontier = new
        raise FuelExhausted(f"hyper fixpoint of loop on {c.guard!r} not reached within {fuel} iterations")
    raise TypeError(c)


# --------------------------------------------------------------------------
# initial equivalence and variety
# --------------------------------------------------------------------------


def _low_vars(l: Level, context: Mapping[str, Level], lattice: SecurityLattice) -> tuple[str, ...]:
    return tuple(sorted(x for x, lx in context.items() if lattice.leq(lx, l)))


def initially_l_equivalent(
    T: Iterable[Trace], l: Level, context: Mapping[str, Level], lattice: SecurityLattice
) -> bool:
    low = _low_vars(l, context, lattice)
    keys = {tuple(t.initial[x] for x in low) for t in T}
    return len(keys) <= 1


def l_classes(
    T: Iterable[Trace], l: Level, context: Mapping[str, Level], lattice: SecurityLattice
) -> list[frozenset]:
    """Maximal initially ``l``-equivalent subsets of ``T``."""
    low = _low_vars(l, context, lattice)
    groups: dict[tuple, set] = {}
    for t in T:
        groups.setdefault(tuple(t.initial[x] for x in low), set()).add(t)
    return [frozenset(g) for g in groups.values()]


def value_set(e: Expr, T: Iterable[Trace]) -> frozenset:
    return frozenset(eval_in(e, t.final) for t in T)


def variety(
    e: Expr, l: Level, T: Iterable[Trace], context: Mapping[str, Level], lattice: SecurityLattice
) -> ValueSetSet:
    """Final value sets of ``e`` over the maximal ``l``-classes of ``T``."""
    return frozenset(value_set(e, R) for R in l_classes(T, l, context, lattice))


def _subsets(T: frozenset) -> Iterator[frozenset]:
    items = sorted(T, key=repr)
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            yield frozenset(combo)


def variety_subsets(
    e: Expr, l: Level, T: Iterable[Trace], context: Mapping[str, Level], lattice: SecurityLattice
) -> ValueSetSet:
    """Same as :func:`variety`, enumerating every ``l``-equivalent subset."""
    T = frozenset(T)
    return frozenset(
        value_set(e, R) for R in _subsets(T) if initially_l_equivalent(R, l, context, lattice)
    )


# --------------------------------------------------------------------------
# value-set abstractions
# --------------------------------------------------------------------------


def crdval(V: Iterable[int]) -> int:
    return len(frozenset(V))


def alpha_crdv(VV: Iterable[Iterable[int]]) -> int:
    return max((crdval(V) for V in VV), default=0)


def in_gamma_crdv(V: Iterable[int], n) -> bool:
    return crdval(V) <= n


def agree(V: Iterable[int]) -> bool:
    return len(frozenset(V)) <= 1


def alpha_agree(VV: Iterable[Iterable[int]]) -> bool:
    return all(agree(V) for V in VV)


def bool_leq(a: bool, b: bool) -> bool:
    """Order of the agreement abstraction: ``tt ⊑ ff`` (reverse implication)."""
    return a or not b


def in_gamma_agree(V: Iterable[int], bv: bool) -> bool:
    return not bv or agree(V)


# --------------------------------------------------------------------------
# trace-set abstractions
# --------------------------------------------------------------------------


def crdtr(T: Iterable[Trace], context: Mapping[str, Level], lattice: SecurityLattice, vars: Iterable[str]) -> CardSet:
    T = frozenset(T)
    vars = tuple(vars)
    rows = {}
    for l in lattice.levels:
        classes = l_classes(T, l, context, lattice)
        for x in vars:
            rows[l, x] = max((len({t.final[x] for t in R}) for R in classes), default=0)
    return CardSet(lattice.levels, vars, rows)


def deptr(T: Iterable[Trace], context: Mapping[str, Level], lattice: SecurityLattice, vars: Iterable[str]) -> DepSet:
    c = crdtr(T, context, lattice, vars)
    return frozenset(k for k, n in c.items() if n <= 1)


def deptr_direct(
    T: Iterable[Trace], context: Mapping[str, Level], lattice: SecurityLattice, vars: Iterable[str]
) -> DepSet:
    """:func:`deptr` via ``alpha_agree`` on the variety, without cardinalities."""
    T = frozenset(T)
    return frozenset(
        (l, x) for l in lattice.levels for x in vars if alpha_agree(variety(Var(x), l, T, context, lattice))
    )


def alpha_cardtr(
    TT: Iterable[frozenset], context: Mapping[str, Level], lattice: SecurityLattice, vars: Iterable[str]
) -> CardSet:
    vars = tuple(vars)
    out = CardSet.constant(lattice.levels, vars, 0)
    for T in TT:
        c = crdtr(T, context, lattice, vars)
        out = out.map(lambda k, n: max(n, c[k]))
    return out


def alpha_deptr(
    TT: Iterable[frozenset], context: Mapping[str, Level], lattice: SecurityLattice, vars: Iterable[str]
) -> DepSet:
    vars = tuple(vars)
    out = frozenset((l, x) for l in lattice.levels for x in vars)
    for T in TT:
        out &= deptr(T, context, lattice, vars)
    return out


def in_gamma_cardtr(
    T: Iterable[Trace], c: CardSet, context: Mapping[str, Level], lattice: SecurityLattice
) -> bool:
    got = crdtr(T, context, lattice, c.vars)
    return all(got[k] <= c[k] for k in c)


def in_gamma_deptr(
    T: Iterable[Trace], d: DepSet, context: Mapping[str, Level], lattice: SecurityLattice, vars: Iterable[str]
) -> bool:
    return d <= deptr(T, context, lattice, vars)
