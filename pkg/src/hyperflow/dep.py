"""Dependence constraints ``l▸x`` and the dependence analysis.

A :data:`DepSet` is a frozenset of ``(level, var)`` pairs. The order is
reverse inclusion (more constraints = more precise) and the join is
intersection. Sets are kept upward closed in the level.

Also here: the algorithmic Hunt–Sands flow-sensitive type system and the
``alpha_hs``/``gamma_hs`` correspondence between dependence sets and type
environments.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping

from .engine import BaseDomain, Run, analyze
from .lang import Assign, BinArith, Command, Compare, Expr, If, IntLit, Seq, Skip, Var, While, expr_vars
from .lattice import Level, SecurityLattice

DepSet = frozenset  # frozenset[tuple[Level, str]]
TypeEnv = Mapping[str, Level]


def dep_order(d1: DepSet, d2: DepSet) -> bool:
    return d1 >= d2


def dep_join(d1: DepSet, d2: DepSet) -> DepSet:
    return d1 & d2


def close(d: Iterable[tuple[Level, str]], lattice: SecurityLattice) -> DepSet:
    """Upward closure: ``l▸x`` entails ``l'▸x`` for every ``l ⊑ l'``."""
    out = set()
    for l, x in d:
        for m in lattice.up(l):
            out.add((m, x))
    return frozenset(out)


def is_well_formed(d: DepSet, lattice: SecurityLattice) -> bool:
    return close(d, lattice) == d


def initial_dep(lattice: SecurityLattice, context: Mapping[str, Level], vars: Iterable[str]) -> DepSet:
    """Dependences holding on the initial traces: ``l▸x`` iff ``Γ(x) ⊑ l``."""
    return frozenset((l, x) for x in vars for l in lattice.levels if lattice.leq(context[x], l))


def agree_expr(e: Expr, l: Level, d: DepSet, single: Callable[[Expr], bool] | None = None) -> bool:
    """Whether ``d`` guarantees that ``e`` takes a single value at level ``l``.

    ``single(e')`` may vouch for any subexpression on its own (e.g. a
    singleton interval).
    """
    if single is not None and single(e):
        return True
    if isinstance(e, IntLit):
        return True
    if isinstance(e, Var):
        return (l, e.name) in d
    return agree_expr(e.lhs, l, d, single) and agree_expr(e.rhs, l, d, single)


def project(d: DepSet, l: Level) -> DepSet:
    return frozenset(c for c in d if c[0] == l)


def equality_operands(b: Compare) -> tuple[str, str] | None:
    if b.op == "==" and isinstance(b.lhs, Var) and isinstance(b.rhs, Var):
        return b.lhs.name, b.rhs.name
    return None


def dep_guard_refine(b: Compare, d: DepSet, lattice: SecurityLattice) -> DepSet:
    """Under ``x1 == x2``, agreement on either operand gives agreement on both."""
    ops = equality_operands(b)
    if ops is None:
        return d
    x1, x2 = ops
    agreed = {l for l, x in d if x in ops}
    return close(d | {(l, v) for l in agreed for v in (x1, x2)}, lattice)


class DepDomain(BaseDomain):
    def __init__(self, lattice: SecurityLattice, vars: Iterable[str], improved_guards: bool = False):
        self.lattice = lattice
        self.vars = tuple(vars)
        self.improved_guards = improved_guards

    def assign(self, d: DepSet, x: str, e: Expr, single=None) -> DepSet:
        kept = {c for c in d if c[1] != x}
        return close(kept | {(l, x) for l in self.lattice.levels if agree_expr(e, l, d, single)}, self.lattice)

    def refine(self, d: DepSet, b: Compare) -> DepSet:
        return dep_guard_refine(b, d, self.lattice) if self.improved_guards else d

    def combine_if(self, b, before, d1, d2, modified, single=None):
        out = set()
        for l in self.lattice.levels:
            if agree_expr(b, l, before, single):
                out |= project(d1, l) & project(d2, l)
            else:
                out |= {c for c in project(before, l) if c[1] not in modified}
        return close(out, self.lattice)

    def join(self, a, b):
        return a & b

    def widen(self, old, new):
        # finite lattice: plain join terminates
        return old & new


def dep_run(c: Command, d0: DepSet, lattice: SecurityLattice, vars: Iterable[str], *, improved_guards=False) -> Run:
    return analyze(DepDomain(lattice, vars, improved_guards), c, close(d0, lattice))


def dep_analyze(c: Command, d0: DepSet, lattice: SecurityLattice, vars: Iterable[str], *, improved_guards=False) -> DepSet:
    return dep_run(c, d0, lattice, vars, improved_guards=improved_guards).final


# --------------------------------------------------------------------------
# Hunt–Sands flow-sensitive typing
# --------------------------------------------------------------------------


def expr_type(e: Expr, env: TypeEnv, lattice: SecurityLattice) -> Level:
    return lattice.join_all(env[x] for x in expr_vars(e))


def env_join(a: TypeEnv, b: TypeEnv, lattice: SecurityLattice) -> dict[str, Level]:
    return {x: lattice.join(a[x], b[x]) for x in a}


def env_leq(a: TypeEnv, b: TypeEnv, lattice: SecurityLattice) -> bool:
    return all(lattice.leq(a[x], b[x]) for x in a)


def hs_typecheck(c: Command, pc: Level, env: TypeEnv, lattice: SecurityLattice) -> dict[str, Level]:
    """Smallest Δ with ``pc ⊢ env {c} Δ`` in the flow-sensitive system."""
    env = dict(env)
    if isinstance(c, Skip):
        return env
    if isinstance(c, Assign):
        env[c.target] = lattice.join(pc, expr_type(c.rhs, env, lattice))
        return env
    if isinstance(c, Seq):
        return hs_typecheck(c.second, pc, hs_typecheck(c.first, pc, env, lattice), lattice)
    if isinstance(c, If):
        pc2 = lattice.join(pc, expr_type(c.guard, env, lattice))
        return env_join(
            hs_typecheck(c.then_branch, pc2, env, lattice), hs_typecheck(c.else_branch, pc2, env, lattice), lattice
        )
    if isinstance(c, While):
        cur = env
        while True:
            pc2 = lattice.join(pc, expr_type(c.guard, cur, lattice))
            nxt = env_join(env, hs_typecheck(c.body, pc2, cur, lattice), lattice)
            if nxt == cur:
                return cur
            cur = nxt
    raise TypeError(c)


def alpha_hs(d: DepSet, lattice: SecurityLattice, vars: Iterable[str]) -> dict[str, Level]:
    """Least level at which each variable is known to agree (⊤ if none)."""
    return {x: lattice.meet_all(l for l, y in d if y == x) for x in vars}


def gamma_hs(env: TypeEnv, lattice: SecurityLattice) -> DepSet:
    return frozenset((l, x) for x, lx in env.items() for l in lattice.levels if lattice.leq(lx, l))
