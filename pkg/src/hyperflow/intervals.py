"""Interval analysis of final-state values and the reductions with cardinalities
and dependences.

Bounds are ints or ``±math.inf``. Any arithmetic result that may leave the
signed 64-bit range is widened to the full line, since the concrete
semantics wraps.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .card import CardSet
from .dep import DepSet, close
from .engine import BaseDomain, Run, analyze
from .extnat import INF, ExtNat
from .lang import INT64_MAX, INT64_MIN, BinArith, Command, Compare, Expr, IntLit, Var
from .lattice import SecurityLattice

NEG_INF = -math.inf


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    @staticmethod
    def const(v: int) -> "Interval":
        return Interval(v, v)

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def __contains__(self, v: int) -> bool:
        return self.lo <= v <= self.hi

    def __repr__(self) -> str:
        if self.empty:
            return "⊥"
        lo = "-∞" if self.lo == NEG_INF else str(int(self.lo))
        hi = "+∞" if self.hi == INF else str(int(self.hi))
        return f"[{lo},{hi}]"


EMPTY = Interval(INF, NEG_INF)
TOP = Interval(NEG_INF, INF)
BOOL = Interval(0, 1)

IntervalEnv = Mapping[str, Interval]


def _norm(lo: float, hi: float) -> Interval:
    if lo > hi:
        return EMPTY
    if lo < INT64_MIN or hi > INT64_MAX:
        return TOP
    return Interval(lo, hi)


def size(i: Interval) -> ExtNat:
    if i.empty:
        return 0
    if i.lo == NEG_INF or i.hi == INF:
        return INF
    return int(i.hi - i.lo + 1)


def hull(a: Interval, b: Interval) -> Interval:
    if a.empty:
        return b
    if b.empty:
        return a
    return Interval(min(a.lo, b.lo), max(a.hi, b.hi))


def meet(a: Interval, b: Interval) -> Interval:
    lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
    return EMPTY if lo > hi else Interval(lo, hi)


def widen_interval(a: Interval, b: Interval) -> Interval:
    if a.empty:
        return b
    if b.empty:
        return a
    return Interval(a.lo if b.lo >= a.lo else NEG_INF, a.hi if b.hi <= a.hi else INF)


def _mulb(a: float, b: float) -> float:
    if a == 0 or b == 0:
        return 0
    return a * b


def _fdivb(a: float, b: float) -> float:
    """Floor division extended to infinite bounds (``b`` nonzero)."""
    if math.isinf(b):
        if math.isinf(a):
            return math.copysign(INF, a) * math.copysign(1, b)
        return 0 if a == 0 or (a > 0) == (b > 0) else -1
    if math.isinf(a):
        return math.copysign(INF, a) * math.copysign(1, b)
    return int(a) // int(b)


def _div(a: Interval, b: Interval) -> Interval:
    out = EMPTY
    if 0 in b:
        out = Interval(0, 0)
    for part in (Interval(b.lo, min(b.hi, -1)), Interval(max(b.lo, 1), b.hi)):
        if part.empty:
            continue
        corners = [_fdivb(x, y) for x in (a.lo, a.hi) for y in (part.lo, part.hi)]
        out = hull(out, Interval(min(corners), max(corners)))
    return out


def _mod(a: Interval, b: Interval) -> Interval:
    # floored remainder: sign follows the divisor
    out = Interval(0, 0) if 0 in b else EMPTY
    if b.hi >= 1:
        smallest = max(b.lo, 1)
        if a.lo >= 0 and a.hi < smallest:
            out = hull(out, a)
        else:
            hi = b.hi - 1 if a.lo < 0 else min(b.hi - 1, a.hi)
            out = hull(out, Interval(0, hi))
    if b.lo <= -1:
        smallest = min(b.hi, -1)
        if a.hi <= 0 and a.lo > smallest:
            out = hull(out, a)
        else:
            lo = b.lo + 1 if a.hi > 0 else max(b.lo + 1, a.lo)
            out = hull(out, Interval(lo, 0))
    return out


def _cmp(op: str, a: Interval, b: Interval) -> Interval:
    can_true = not _refine_pair(op, a, b)[0].empty
    can_false = not _refine_pair(_NEG[op], a, b)[0].empty
    return Interval(0 if can_false else 1, 1 if can_true else 0)


def eval_interval(e: Expr, env: IntervalEnv) -> Interval:
    if isinstance(e, IntLit):
        return Interval.const(e.value)
    if isinstance(e, Var):
        return env[e.name]
    a = eval_interval(e.lhs, env)
    b = eval_interval(e.rhs, env)
    if a.empty or b.empty:
        return EMPTY
    if isinstance(e, Compare):
        return _cmp(e.op, a, b)
    op = e.op
    if op == "+":
        return _norm(a.lo + b.lo, a.hi + b.hi)
    if op == "-":
        return _norm(a.lo - b.hi, a.hi - b.lo)
    if op == "*":
        ps = [_mulb(x, y) for x in (a.lo, a.hi) for y in (b.lo, b.hi)]
        return _norm(min(ps), max(ps))
    if op == "/":
        r = _div(a, b)
        return _norm(r.lo, r.hi)
    if op == "%":
        return _mod(a, b)
    raise ValueError(op)


# guard refinement ----------------------------------------------------------

_NEG = {"==": "!=", "!=": "==", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}
_FLIP = {"==": "==", "!=": "!=", "<": ">", ">": "<", "<=": ">=", ">=": "<="}


def _refine_pair(op: str, a: Interval, b: Interval) -> tuple[Interval, Interval]:
    """Sub-intervals of ``a`` and ``b`` compatible with ``a op b``."""
    if a.empty or b.empty:
        return EMPTY, EMPTY
    if op == "==":
        m = meet(a, b)
        return m, m
    if op == "<":
        ra, rb = meet(a, Interval(NEG_INF, b.hi - 1)), meet(b, Interval(a.lo + 1, INF))
    elif op == "<=":
        ra, rb = meet(a, Interval(NEG_INF, b.hi)), meet(b, Interval(a.lo, INF))
    elif op == ">":
        rb, ra = _refine_pair("<", b, a)
    elif op == ">=":
        rb, ra = _refine_pair("<=", b, a)
    elif op == "!=":
        ra, rb = a, b
        if b.lo == b.hi:
            ra = _drop_end(a, b.lo)
        if a.lo == a.hi:
            rb = _drop_end(b, a.lo)
    else:
        raise ValueError(op)
    if ra.empty or rb.empty:
        return EMPTY, EMPTY
    return ra, rb


def _drop_end(a: Interval, v: float) -> Interval:
    if a.lo == v:
        a = Interval(a.lo + 1, a.hi)
    if not a.empty and a.hi == v:
        a = Interval(a.lo, a.hi - 1)
    return EMPTY if a.empty else a


def bottom_env(vars: Iterable[str]) -> dict[str, Interval]:
    return {x: EMPTY for x in vars}


def is_bottom(env: IntervalEnv) -> bool:
    return any(i.empty for i in env.values())


def _normalize(env: Mapping[str, Interval]) -> dict[str, Interval]:
    return bottom_env(env) if is_bottom(env) else dict(env)


def refine_env(env: IntervalEnv, b: Compare) -> dict[str, Interval]:
    """Restrict ``env`` to states where ``b`` may hold."""
    if is_bottom(env):
        return dict(env)
    if eval_interval(b, env) == Interval(0, 0):
        return bottom_env(env)
    out = dict(env)
    lhs, rhs = b.lhs, b.rhs
    a = eval_interval(lhs, env)
    c = eval_interval(rhs, env)
    ra, rc = _refine_pair(b.op, a, c)
    if ra.empty:
        return bottom_env(env)
    if isinstance(lhs, Var):
        out[lhs.name] = meet(out[lhs.name], ra)
    if isinstance(rhs, Var):
        out[rhs.name] = meet(out[rhs.name], rc)
    return _normalize(out)


def env_join(a: IntervalEnv, b: IntervalEnv) -> dict[str, Interval]:
    if is_bottom(a):
        return dict(b)
    if is_bottom(b):
        return dict(a)
    return {x: hull(a[x], b[x]) for x in a}


def env_leq(a: IntervalEnv, b: IntervalEnv) -> bool:
    if is_bottom(a):
        return True
    if is_bottom(b):
        return False
    return all(b[x].lo <= a[x].lo and a[x].hi <= b[x].hi for x in a)


def env_widen(a: IntervalEnv, b: IntervalEnv) -> dict[str, Interval]:
    if is_bottom(a):
        return dict(b)
    if is_bottom(b):
        return dict(a)
    return {x: widen_interval(a[x], b[x]) for x in a}


def env_meet(a: IntervalEnv, b: IntervalEnv) -> dict[str, Interval]:
    return _normalize({x: meet(a[x], b[x]) for x in a})


def top_env(vars: Iterable[str]) -> dict[str, Interval]:
    return {x: TOP for x in vars}


def range_env(vars: Iterable[str], lo: int, hi: int) -> dict[str, Interval]:
    return {x: Interval(lo, hi) for x in vars}


class IntervalDomain(BaseDomain):
    def assign(self, env, x, e):
        if is_bottom(env):
            return dict(env)
        out = dict(env)
        out[x] = eval_interval(e, env)
        return _normalize(out)

    def refine(self, env, b):
        return refine_env(env, b)

    def combine_if(self, b, before, s1, s2, modified):
        return env_join(s1, s2)

    def join(self, a, b):
        return env_join(a, b)

    def widen(self, old, new):
        return env_widen(old, new)

    def narrow(self, head, entry, body):
        # one decreasing step: head ⊓ (entry ⊔ body(head))
        return env_meet(head, env_join(entry, body(head)))


def interval_run(c: Command, env0: IntervalEnv) -> Run:
    return analyze(IntervalDomain(), c, dict(env0))


def interval_analyze(c: Command, env0: IntervalEnv) -> dict[str, Interval]:
    return interval_run(c, env0).final


# reductions ---------------------------------------------------------------


def tocard(c: CardSet, env: IntervalEnv) -> CardSet:
    return c.map(lambda k, n: min(n, size(env[k[1]])))


def toint(c: CardSet, env: IntervalEnv) -> IntervalEnv:
    return env


def todep(d: DepSet, env: IntervalEnv, lattice: SecurityLattice) -> DepSet:
    singletons = [x for x, i in env.items() if size(i) == 1]
    return close(d | {(l, x) for l in lattice.levels for x in singletons}, lattice)
