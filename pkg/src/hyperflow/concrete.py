"""Executable relational-trace semantics and the standard collecting semantics.

Values are signed 64-bit integers with wrap-around arithmetic. Division and
remainder round towards negative infinity (``//`` and ``%`` in Python) and a
zero divisor yields 0, so evaluation is total.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping
from typing import NamedTuple, Union

from .lang import Assign, BinArith, Command, Compare, Expr, If, IntLit, Seq, Skip, Var, While, negate

DEFAULT_FUEL = 10_000


def wrap64(v: int) -> int:
    return ((v + 2**63) % 2**64) - 2**63


class State(Mapping[str, int]):
    """Immutable, hashable map from variable names to values."""

    __slots__ = ("_d", "_hash")

    def __init__(self, values: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        self._d = dict(values)
        self._hash = hash(frozenset(self._d.items()))

    def __getitem__(self, k: str) -> int:
        return self._d[k]

    def __iter__(self) -> Iterator[str]:
        return iter(self._d)

    def __len__(self) -> int:
        return len(self._d)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, State):
            return self._hash == other._hash and self._d == other._d
        return NotImplemented

    def set(self, name: str, value: int) -> "State":
        d = dict(self._d)
        d[name] = value
        return State(d)

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}↦{v}" for k, v in sorted(self._d.items()))
        return "{" + inner + "}"


class Trace(NamedTuple):
    initial: State
    final: State


class _Bottom:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "⊥"

    def __reduce__(self):
        return (_Bottom, ())


BOTTOM = _Bottom()
MaybeTrace = Union[Trace, _Bottom]
TraceSet = frozenset  # frozenset[Trace]


class FuelExhausted(Exception):
    """A fixpoint iteration did not stabilise within the allotted fuel."""


# --------------------------------------------------------------------------
# expressions
# --------------------------------------------------------------------------


def _arith(op: str, a: int, b: int) -> int:
    if op == "+":
        return wrap64(a + b)
    if op == "-":
        return wrap64(a - b)
    if op == "*":
        return wrap64(a * b)
    if op == "/":
        return 0 if b == 0 else wrap64(a // b)
    if op == "%":
        return 0 if b == 0 else a % b
    raise ValueError(op)


def _cmp(op: str, a: int, b: int) -> int:
    if op == "==":
        return int(a == b)
    if op == "!=":
        return int(a != b)
    if op == "<":
        return int(a < b)
    if op == "<=":
        return int(a <= b)
    if op == ">":
        return int(a > b)
    if op == ">=":
        return int(a >= b)
    raise ValueError(op)


def eval_in(e: Expr, s: Mapping[str, int]) -> int:
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, Var):
        return s[e.name]
    if isinstance(e, BinArith):
        return _arith(e.op, eval_in(e.lhs, s), eval_in(e.rhs, s))
    if isinstance(e, Compare):
        return _cmp(e.op, eval_in(e.lhs, s), eval_in(e.rhs, s))
    raise TypeError(e)


def eval_expr_final(e: Expr, t: Trace) -> int:
    return eval_in(e, t.final)


def eval_expr_initial(e: Expr, t: Trace) -> int:
    return eval_in(e, t.initial)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _run(c: Command, t: Trace, fuel: int) -> tuple[MaybeTrace, int]:
    if isinstance(c, Skip):
        return t, fuel
    if isinstance(c, Assign):
        return Trace(t.initial, t.final.set(c.target, eval_in(c.rhs, t.final))), fuel
    if isinstance(c, Seq):
        r, fuel = _run(c.first, t, fuel)
        if r is BOTTOM:
            return r, fuel
        return _run(c.second, r, fuel)
    if isinstance(c, If):
        branch = c.then_branch if eval_in(c.guard, t.final) == 1 else c.else_branch
        return _run(branch, t, fuel)
    if isinstance(c, While):
        while eval_in(c.guard, t.final) == 1:
            if fuel <= 0:
                return BOTTOM, 0
            fuel -= 1
            r, fuel = _run(c.body, t, fuel)
            if r is BOTTOM:
                return r, fuel
            t = r
        return t, fuel
    raise TypeError(c)


def run_command(c: Command, t: MaybeTrace, fuel: int = DEFAULT_FUEL) -> MaybeTrace:
    """Denotation of ``c`` on one trace; ``fuel`` bounds loop-body executions."""
    if t is BOTTOM:
        return BOTTOM
    return _run(c, t, fuel)[0]


def collect(c: Command, T: Iterable[Trace], fuel: int = DEFAULT_FUEL) -> frozenset:
    """Terminating part of the direct image of ``run_command`` over ``T``."""
    out = set()
    for t in T:
        r = _run(c, t, fuel)[0]
        if r is not BOTTOM:
            out.add(r)
    return frozenset(out)


def guard_filter(b: Compare, T: Iterable[Trace]) -> frozenset:
    return frozenset(t for t in T if eval_in(b, t.final) == 1)


def collect_fixpoint(c: Command, T: frozenset, fuel: int = DEFAULT_FUEL) -> frozenset:
    """Collecting semantics computed compositionally, loops as least fixpoints.

    ``fuel`` bounds the number of fixpoint iterations per loop; raises
    :class:`FuelExhausted` when a loop's iterate does not stabilise.
    """
    if isinstance(c, Skip):
        return T
    if isinstance(c, Assign):
        return frozenset(Trace(t.initial, t.final.set(c.target, eval_in(c.rhs, t.final))) for t in T)
    if isinstance(c, Seq):
        return collect_fixpoint(c.second, collect_fixpoint(c.first, T, fuel), fuel)
    if isinstance(c, If):
        return collect_fixpoint(c.then_branch, guard_filter(c.guard, T), fuel) | collect_fixpoint(
            c.else_branch, guard_filter(negate(c.guard), T), fuel
        )
    if isinstance(c, While):
        # Kleene iteration of X ↦ X ∪ [[if b then c else skip]] X, semi-naively:
        # the step is a direct image, so only the frontier needs re-running.
        reached, frontier = set(T), set(T)
        for _ in range(fuel + 1):
            step = collect_fixpoint(c.body, guard_filter(c.guard, frontier), fuel)
            new = step - reached
            if not new:
                return guard_filter(negate(c.guard), reached)
            reached |= new
            frontier = new
        raise FuelExhausted(f"loop fixpoint not reached within {fuel} iterations")
    raise TypeError(c)


def initial_traces(vars: Iterable[str], values: Iterable[int]) -> frozenset:
    """All diagonal traces (σ, σ) with σ ranging over ``vars`` × ``values``."""
    vars = tuple(vars)
    values = tuple(values)
    out = set()
    for combo in itertools.product(values, repeat=len(vars)):
        s = State(zip(vars, combo))
        out.add(Trace(s, s))
    return frozenset(out)


def terminates_on(c: Command, T: Iterable[Trace], fuel: int = DEFAULT_FUEL) -> bool:
    return all(_run(c, t, fuel)[0] is not BOTTOM for t in T)
