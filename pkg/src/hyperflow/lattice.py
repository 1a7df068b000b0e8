"""Finite security lattices, typing contexts and their text configuration.

Config text recognises two kinds of lines::

    lattice: L < M1 < H; L < M2 < H     (chains of covering pairs, ';'-separated)
    lattice: universal                  (powerset of the program variables)
    context: secret:H, y1:L             (variables not listed get the top level)

Lines may be prefixed with ``//!`` so that the block can live at the head of a
program file.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

Level = str
TypingContext = Mapping[str, Level]

MAX_UNIVERSAL_VARS = 10


class LatticeError(ValueError):
    pass


class CycleError(LatticeError):
    pass


class NotALatticeError(LatticeError):
    pass


class UnknownLevelError(LatticeError):
    pass


class SecurityLattice:
    """A finite lattice with tabulated order, join and meet."""

    def __init__(self, levels: Iterable[Level], covers: Iterable[tuple[Level, Level]] = ()):
        self.levels: tuple[Level, ...] = tuple(dict.fromkeys(levels))
        if not self.levels:
            raise LatticeError("a lattice needs at least one level")
        index = {l: i for i, l in enumerate(self.levels)}
        n = len(self.levels)
        # up[i]: bitmask of levels above level i (reflexive-transitive closure)
        up = [1 << i for i in range(n)]
        for a, b in covers:
            if a not in index or b not in index:
                raise UnknownLevelError(f"unknown level in order pair {a!r} < {b!r}")
            up[index[a]] |= 1 << index[b]
        for k in range(n):
            bit = 1 << k
            for i in range(n):
                if up[i] & bit:
                    up[i] |= up[k]
        down = [0] * n
        for i in range(n):
            for j in range(n):
                if up[i] >> j & 1:
                    down[j] |= 1 << i
        for i in range(n):
            if up[i] & down[i] != 1 << i:
                j = (up[i] & down[i] & ~(1 << i)).bit_length() - 1
                raise CycleError(f"cycle in order between {self.levels[i]!r} and {self.levels[j]!r}")
        self._up = {l: up[i] for i, l in enumerate(self.levels)}
        self._index = index
        by_up = {m: self.levels[i] for i, m in enumerate(up)}
        by_down = {m: self.levels[i] for i, m in enumerate(down)}
        self._join: dict[tuple[Level, Level], Level] = {}
        self._meet: dict[tuple[Level, Level], Level] = {}
        for i, a in enumerate(self.levels):
            for j, b in enumerate(self.levels):
                lub = by_up.get(up[i] & up[j])
                glb = by_down.get(down[i] & down[j])
                if lub is None:
                    raise NotALatticeError(f"no least upper bound for {a!r} and {b!r}")
                if glb is None:
                    raise NotALatticeError(f"no greatest lower bound for {a!r} and {b!r}")
                self._join[a, b] = lub
                self._meet[a, b] = glb
        by_down_inv = {self.levels[i]: m for i, m in enumerate(down)}
        self.bottom = self.meet_all(self.levels)
        self.top = self.join_all(self.levels)
        # ascending order used for stable output
        self.sorted_levels = tuple(sorted(self.levels, key=lambda l: (bin(by_down_inv[l]).count("1"), l)))

    def __repr__(self) -> str:
        return f"SecurityLattice({list(self.levels)})"

    def __contains__(self, level: object) -> bool:
        return level in self.levels

    def __len__(self) -> int:
        return len(self.levels)

    def leq(self, a: Level, b: Level) -> bool:
        return bool(self._up[a] >> self._index[b] & 1)

    def join(self, a: Level, b: Level) -> Level:
        return self._join[a, b]

    def meet(self, a: Level, b: Level) -> Level:
        return self._meet[a, b]

    def join_all(self, ls: Iterable[Level]) -> Level:
        out = None
        for l in ls:
            out = l if out is None else self.join(out, l)
        return self.bottom if out is None else out

    def meet_all(self, ls: Iterable[Level]) -> Level:
        out = None
        for l in ls:
            out = l if out is None else self.meet(out, l)
        return self.top if out is None else out

    def up(self, l: Level) -> tuple[Level, ...]:
        return tuple(m for m in self.levels if self.leq(l, m))


def two_point() -> SecurityLattice:
    return SecurityLattice(["L", "H"], [("L", "H")])


def chain(*names: Level) -> SecurityLattice:
    return SecurityLattice(names, zip(names, names[1:]))


def diamond() -> SecurityLattice:
    return SecurityLattice(["L", "M1", "M2", "H"], [("L", "M1"), ("L", "M2"), ("M1", "H"), ("M2", "H")])


def level_name(vs: Iterable[str]) -> Level:
    return "{" + ",".join(vs) + "}"


def universal_flow_lattice(vars: Iterable[str]) -> tuple[SecurityLattice, dict[str, Level]]:
    """Powerset of ``vars`` ordered by inclusion, with context λx.{x}."""
    vars = tuple(vars)
    if len(vars) > MAX_UNIVERSAL_VARS:
        raise LatticeError(f"universal lattice over {len(vars)} variables exceeds cap {MAX_UNIVERSAL_VARS}")
    subsets = [s for r in range(len(vars) + 1) for s in itertools.combinations(vars, r)]
    names = {s: level_name(s) for s in subsets}
    covers = [
        (names[s], names[t]) for s in subsets for t in subsets if len(t) == len(s) + 1 and set(s) <= set(t)
    ]
    lat = SecurityLattice([names[s] for s in subsets], covers)
    return lat, {x: level_name((x,)) for x in vars}


@dataclass
class Config:
    """Parsed configuration block; ``universal`` defers lattice construction."""

    lattice: SecurityLattice | None = None
    universal: bool = False
    context: dict[str, Level] = field(default_factory=dict)

    def resolve(self, vars: Iterable[str]) -> tuple[SecurityLattice, dict[str, Level]]:
        """Lattice and total typing context for the program variables ``vars``."""
        vars = tuple(vars)
        if self.universal:
            lat, ctx = universal_flow_lattice(vars)
        else:
            lat = self.lattice or two_point()
            ctx = {}
        for x, l in self.context.items():
            if l not in lat:
                raise UnknownLevelError(f"unknown level {l!r} for variable {x!r}")
            ctx[x] = l
        return lat, {x: ctx.get(x, lat.top) for x in vars}


_CONFIG_LINE = re.compile(r"^\s*(?://!)?\s*(lattice|context)\s*:(.*)$")


def config_lines(text: str) -> list[tuple[str, str]]:
    out = []
    for line in text.splitlines():
        m = _CONFIG_LINE.match(line)
        if m:
            out.append((m.group(1), m.group(2).strip()))
    return out


def _parse_lattice_text(text: str) -> tuple[list[Level], list[tuple[Level, Level]]]:
    levels: list[Level] = []
    covers: list[tuple[Level, Level]] = []
    for chain_text in text.split(";"):
        names = [n.strip() for n in chain_text.split("<")]
        if any(not re.fullmatch(r"[A-Za-z_][\w{},]*", n) for n in names if n) or "" in names:
            if chain_text.strip():
                raise LatticeError(f"malformed lattice chain {chain_text.strip()!r}")
            continue
        levels.extend(names)
        covers.extend(zip(names, names[1:]))
    return levels, covers


def parse_config(text: str) -> Config:
    cfg = Config()
    levels: list[Level] = []
    covers: list[tuple[Level, Level]] = []
    for key, value in config_lines(text):
        if key == "lattice":
            if value == "universal":
                cfg.universal = True
                continue
            ls, cs = _parse_lattice_text(value)
            levels += ls
            covers += cs
        else:
            for item in filter(None, (s.strip() for s in value.split(","))):
                if ":" not in item:
                    raise LatticeError(f"malformed context entry {item!r}; expected var:Level")
                var, lvl = (s.strip() for s in item.split(":", 1))
                cfg.context[var] = lvl
    if levels:
        if cfg.universal:
            raise LatticeError("'lattice: universal' cannot be combined with explicit levels")
        cfg.lattice = SecurityLattice(levels, covers)
    if cfg.lattice is not None:
        for x, l in cfg.context.items():
            if l not in cfg.lattice:
                raise UnknownLevelError(f"unknown level {l!r} for variable {x!r}")
    return cfg


def load_lattice(text: str) -> SecurityLattice:
    cfg = parse_config(text)
    if cfg.lattice is None:
        raise LatticeError("no explicit 'lattice:' line in config")
    return cfg.lattice
