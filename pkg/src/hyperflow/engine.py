"""Generic structural abstract interpreter shared by every analysis.

A domain supplies the transfer functions; the engine walks the command,
records the abstract state after each statement and runs loop-head
fixpoints. Loops are analysed as the least fixpoint, above the entry state,
of the one-step unrolling ``if b then body else skip``, joining each iterate
with its predecessor and widening from the second iterate on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Generic, Protocol, TypeVar

from .lang import Assign, Command, Compare, Expr, If, Seq, Skip, While, mod_vars, negate

S = TypeVar("S")

MAX_LOOP_ITERATIONS = 10_000


class AnalysisDivergence(RuntimeError):
    pass


class Domain(Protocol[S]):
    def assign(self, s: S, x: str, e: Expr) -> S: ...

    def refine(self, s: S, b: Compare) -> S:
        """State restricted to where ``b`` holds (branch entry, loop exit)."""
        ...

    def combine_if(self, b: Compare, before: S, s1: S, s2: S, modified: frozenset[str]) -> S: ...

    def join(self, a: S, b: S) -> S: ...

    def widen(self, old: S, new: S) -> S: ...

    def narrow(self, head: S, entry: S, body: Callable[[S], S]) -> S:
        """Refine a post-fixpoint ``head``; ``body(h)`` runs one guarded body pass."""
        ...


@dataclass
class LoopStat:
    loop: While
    iterations: int


@dataclass
class Run(Generic[S]):
    final: S
    initial: S
    snapshots: dict[int, Any]
    loop_stats: list[LoopStat] = field(default_factory=list)

    def after(self, stmt: Command) -> S:
        return self.snapshots[id(stmt)]


class Interpreter(Generic[S]):
    def __init__(self, domain: Domain[S], max_iterations: int = MAX_LOOP_ITERATIONS):
        self.domain = domain
        self.max_iterations = max_iterations
        self.snapshots: dict[int, S] = {}
        self.loop_stats: list[LoopStat] = []

    def run(self, c: Command, s: S) -> Run[S]:
        self.snapshots = {}
        self.loop_stats = []
        out = self.exec(c, s)
        return Run(out, s, self.snapshots, self.loop_stats)

    def exec(self, c: Command, s: S) -> S:
        d = self.domain
        if isinstance(c, Seq):
            return self.exec(c.second, self.exec(c.first, s))
        if isinstance(c, Skip):
            out = s
        elif isinstance(c, Assign):
            out = d.assign(s, c.target, c.rhs)
        elif isinstance(c, If):
            out = self._unroll(c.guard, c.then_branch, c.else_branch, s, mod_vars(c))
        elif isinstance(c, While):
            out = self._loop(c, s)
        else:
            raise TypeError(c)
        self.snapshots[id(c)] = out
        return out

    def _unroll(self, b: Compare, c1: Command, c2: Command, s: S, modified: frozenset[str]) -> S:
        d = self.domain
        s1 = self.exec(c1, d.refine(s, b))
        s2 = self.exec(c2, d.refine(s, negate(b)))
        return d.combine_if(b, s, s1, s2, modified)

    def _loop(self, w: While, entry: S) -> S:
        d = self.domain
        modified = mod_vars(w.body)
        skip = Skip()
        head = entry
        k = 0
        while True:
            k += 1
            if k > self.max_iterations:
                raise AnalysisDivergence(
                    f"loop {w.guard!r} did not stabilise within {self.max_iterations} iterations; last head {head!r}"
                )
            step = d.join(head, self._unroll(w.guard, w.body, skip, head, modified))
            if k > 1:
                step = d.widen(head, step)
            if step == head:
                break
            head = step
        self.loop_stats.append(LoopStat(w, k))
        # the last unrolling ran on the stable head, so snapshots are current
        head = d.narrow(head, entry, lambda h: self.exec(w.body, d.refine(h, w.guard)))
        return d.refine(head, negate(w.guard))


def analyze(domain: Domain[S], c: Command, s0: S, max_iterations: int = MAX_LOOP_ITERATIONS) -> Run[S]:
    return Interpreter(domain, max_iterations).run(c, s0)


class BaseDomain:
    """Defaults: guards carry no information, no narrowing."""

    def refine(self, s, b):
        return s

    def narrow(self, head, entry, body):
        return head
