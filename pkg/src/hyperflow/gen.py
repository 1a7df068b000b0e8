"""Random tiny programs, lattices and typing contexts for oracle testing."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .concrete import initial_traces, terminates_on
from .lang import ARITH_OPS, CMP_OPS, Assign, BinArith, Command, Compare, Expr, If, IntLit, Skip, Var, While, seq
from .lattice import Level, SecurityLattice, chain, diamond, two_point

VAR_POOL = ("a", "b", "c")


@dataclass
class GenConfig:
    max_vars: int = 3
    depth: int = 3
    expr_depth: int = 2
    lit_lo: int = -1
    lit_hi: int = 3
    ops: tuple[str, ...] = ARITH_OPS
    loop_weight: float = 0.2


class ProgramGen:
    def __init__(self, rng: random.Random, cfg: GenConfig | None = None):
        self.rng = rng
        self.cfg = cfg or GenConfig()
        self.vars = VAR_POOL[: self.rng.randint(1, self.cfg.max_vars)]

    def var(self) -> str:
        return self.rng.choice(self.vars)

    def expr(self, depth: int | None = None) -> Expr:
        depth = self.cfg.expr_depth if depth is None else depth
        r = self.rng.random()
        if depth == 0 or r < 0.35:
            if self.rng.random() < 0.6:
                return Var(self.var())
            return IntLit(self.rng.randint(self.cfg.lit_lo, self.cfg.lit_hi))
        return BinArith(self.rng.choice(self.cfg.ops), self.expr(depth - 1), self.expr(depth - 1))

    def guard(self) -> Compare:
        op = self.rng.choice(CMP_OPS)
        lhs = Var(self.var()) if self.rng.random() < 0.8 else self.expr(1)
        if self.rng.random() < 0.5:
            rhs: Expr = Var(self.var())
        else:
            rhs = self.expr(1)
        return Compare(op, lhs, rhs)

    def command(self, depth: int | None = None) -> Command:
        depth = self.cfg.depth if depth is None else depth
        if depth <= 1:
            return self.atom()
        r = self.rng.random()
        if r < 0.35:
            return seq(self.command(depth - 1), self.command(depth - 1))
        if r < 0.65:
            return If(self.guard(), self.command(depth - 1), self.command(depth - 1))
        if r < 0.65 + self.cfg.loop_weight:
            return self.loop(depth)
        return self.atom()

    def atom(self) -> Command:
        r = self.rng.random()
        if r < 0.1:
            return Skip()
        if r < 0.25:
            return Assign(self.var(), Compare(self.rng.choice(CMP_OPS), self.expr(1), self.expr(1)))
        return Assign(self.var(), self.expr())

    def loop(self, depth: int) -> Command:
        # counting loops terminate unless the body interferes with the counter
        v = self.var()
        k = self.rng.randint(self.cfg.lit_lo, self.cfg.lit_hi)
        body = self.command(depth - 1)
        if self.rng.random() < 0.5:
            return While(Compare("<", Var(v), IntLit(k)), seq(body, Assign(v, BinArith("+", Var(v), IntLit(1)))))
        if self.rng.random() < 0.5:
            return While(Compare(">", Var(v), IntLit(k)), seq(body, Assign(v, BinArith("-", Var(v), IntLit(1)))))
        return While(self.guard(), body)


def random_program(
    rng: random.Random,
    cfg: GenConfig | None = None,
    values: tuple[int, ...] = (0, 1, 2),
    fuel: int = 200,
    max_tries: int = 100,
) -> tuple[Command, tuple[str, ...]]:
    """A program (and its variable tuple) terminating within ``fuel`` on every
    initial state over ``values``."""
    for _ in range(max_tries):
        g = ProgramGen(rng, cfg)
        c = g.command()
        if terminates_on(c, initial_traces(g.vars, values), fuel):
            return c, tuple(g.vars)
    raise RuntimeError("no terminating program found")


def small_lattices() -> list[SecurityLattice]:
    """Every 2- to 4-point lattice shape used by the oracle suites."""
    return [two_point(), chain("L", "M", "H"), chain("L", "M1", "M2", "H"), diamond()]


def random_lattice(rng: random.Random) -> SecurityLattice:
    return rng.choice(small_lattices())


def random_context(rng: random.Random, lattice: SecurityLattice, vars) -> dict[str, Level]:
    return {x: rng.choice(lattice.levels) for x in vars}
