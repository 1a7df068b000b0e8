"""Analysis driver: runs the selected analyses on a program and renders the
results as tables, structured records or an annotated copy of the source."""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from . import extnat
from .card import CardSet, Verdict, check_sr, from_dep, initial_card, leakage_bits
from .dep import alpha_hs, hs_typecheck, initial_dep
from .engine import Run
from .extnat import ExtNat
from .intervals import top_env
from .lang import Command, Program, mod_vars, statements
from .lattice import Config, Level, SecurityLattice, parse_config
from .product import ProductState, product_run


@dataclass(frozen=True)
class SRQuery:
    level: Level
    k: ExtNat
    var: str

    @staticmethod
    def parse(text: str) -> "SRQuery":
        parts = text.split()
        if len(parts) != 4 or parts[0] != "SR":
            raise ValueError(f"malformed SR query {text!r}; expected 'SR <level> <k> <var>'")
        k = extnat.parse(parts[2])
        if k < 1:
            raise ValueError("SR bound k must be at least 1")
        return SRQuery(parts[1], k, parts[3])

    def __str__(self) -> str:
        return f"SR({self.level},{extnat.fmt(self.k)},{self.var})"


@dataclass
class AnalysisConfig:
    dep: bool = False
    card: bool = True
    intervals: bool = False
    improved_guards: bool = False
    product: bool = False
    hs: bool = False
    checks: list[SRQuery] = field(default_factory=list)

    def normalized(self) -> "AnalysisConfig":
        cfg = AnalysisConfig(**{**self.__dict__, "checks": list(self.checks)})
        if cfg.product:
            cfg.intervals = True
            if not (cfg.card or cfg.dep):
                cfg.card = True
        if cfg.checks:
            cfg.card = True
        if not (cfg.dep or cfg.card or cfg.intervals or cfg.hs):
            raise ValueError("no analysis selected")
        return cfg


@dataclass
class Report:
    program: Program
    lattice: SecurityLattice
    context: dict[str, Level]
    config: AnalysisConfig
    run: Run | None
    hs: dict[str, Level] | None = None
    verdicts: list[tuple[SRQuery, Verdict]] = field(default_factory=list)

    @property
    def vars(self) -> tuple[str, ...]:
        return self.program.vars

    @property
    def final(self) -> ProductState:
        return self.run.final

    def leakage(self) -> dict[tuple[Level, str], float | None]:
        if self.run is None or self.final.card is None:
            return {}
        c = self.final.card
        return {(l, x): leakage_bits(c, l, x) for l in self.sorted_levels() for x in sorted(self.vars)}

    def sorted_levels(self) -> list[Level]:
        return sorted(self.lattice.levels)

    def points(self) -> list[tuple[str, Command | None, ProductState]]:
        """(label, statement, state) for the entry and every statement, in source order."""
        out: list[tuple[str, Command | None, ProductState]] = [("entry", None, self.run.initial)]
        for s in statements(self.program.body):
            if id(s) in self.run.snapshots:
                line = s.span.line if s.span is not None else 0
                out.append((f"line {line}: {type(s).__name__.lower()}", s, self.run.snapshots[id(s)]))
        return out


def analyze(
    program: Program, lattice: SecurityLattice, context: Mapping[str, Level], config: AnalysisConfig
) -> Report:
    cfg = config.normalized()
    vars = program.vars
    context = {x: context[x] for x in vars}
    for q in cfg.checks:
        if q.level not in lattice:
            raise ValueError(f"unknown level {q.level!r} in {q}")
        if q.var not in vars:
            raise ValueError(f"unknown variable {q.var!r} in {q}")
    run = None
    if cfg.dep or cfg.card or cfg.intervals:
        s0 = ProductState(
            initial_card(lattice, context, vars) if cfg.card else None,
            initial_dep(lattice, context, vars) if cfg.dep else None,
            top_env(vars) if cfg.intervals else None,
        )
        run = product_run(
            program.body, s0, lattice, vars, improved_guards=cfg.improved_guards, reduce=cfg.product
        )
    rep = Report(program, lattice, dict(context), cfg, run)
    if cfg.hs:
        rep.hs = hs_typecheck(program.body, lattice.bottom, context, lattice)
    if run is not None and run.final.card is not None:
        rep.verdicts = [(q, check_sr(run.final.card, q.level, q.k, q.var)) for q in cfg.checks]
    return rep


def embedded_config(source: str) -> Config:
    return parse_config("\n".join(l for l in source.splitlines() if l.lstrip().startswith("//!")))


# --------------------------------------------------------------------------
# rendering
# --------------------------------------------------------------------------


def _card_items(c: CardSet, levels: Iterable[Level], vars: Iterable[str], ascii: bool = False) -> list[str]:
    return [f"{l}▸{x}:{extnat.fmt(c[l, x], ascii)}" for l in levels for x in vars]


def _dep_items(d, levels, vars) -> list[str]:
    return [f"{l}▸{x}" for l in levels for x in vars if (l, x) in d]


def format_text(rep: Report) -> str:
    levels, vars = rep.sorted_levels(), sorted(rep.vars)
    lines = [f"lattice: {rep.lattice!r}", "context: " + ", ".join(f"{x}:{rep.context[x]}" for x in vars)]
    if rep.run is not None:
        for label, _, s in rep.points():
            lines.append(f"[{label}]")
            if s.card is not None:
                lines.append("  card: " + ", ".join(_card_items(s.card, levels, vars)))
            if s.dep is not None:
                lines.append("  dep:  " + (", ".join(_dep_items(s.dep, levels, vars)) or "(none)"))
            if s.itv is not None:
                lines.append("  itv:  " + ", ".join(f"{x}∈{s.itv[x]!r}" for x in vars))
        for st in rep.run.loop_stats:
            line = st.loop.span.line if st.loop.span is not None else 0
            lines.append(f"loop at line {line}: {st.iterations} head iterations")
    if rep.hs is not None:
        lines.append("hs: " + ", ".join(f"{x}:{rep.hs[x]}" for x in vars))
    leak = rep.leakage()
    if leak:
        lines.append("leakage (bits):")
        for (l, x), bits in leak.items():
            lines.append(f"  {x}@{l} = {_fmt_bits(bits)}")
    for q, v in rep.verdicts:
        lines.append(f"{q}: {v.value}")
    return "\n".join(lines) + "\n"


def _fmt_bits(bits: float | None) -> str:
    if bits is None:
        return "unreachable"
    if bits == extnat.INF:
        return "inf"
    return f"{bits:.1f}" if float(bits).is_integer() else f"{bits:.3f}"


def _state_record(s: ProductState, levels, vars) -> dict:
    rec: dict = {}
    if s.card is not None:
        rec["card"] = [[l, x, _json_nat(s.card[l, x])] for l in levels for x in vars]
    if s.dep is not None:
        rec["dep"] = [[l, x] for l in levels for x in vars if (l, x) in s.dep]
    if s.itv is not None:
        rec["intervals"] = {x: _json_itv(s.itv[x]) for x in vars}
    return rec


def _json_nat(n: ExtNat):
    return "inf" if n == extnat.INF else int(n)


def _json_itv(i):
    if i.empty:
        return None
    return [_json_bound(i.lo), _json_bound(i.hi)]


def _json_bound(b):
    if b == extnat.INF:
        return "inf"
    if b == -extnat.INF:
        return "-inf"
    return int(b)


def to_record(rep: Report) -> dict:
    levels, vars = rep.sorted_levels(), sorted(rep.vars)
    rec: dict = {
        "lattice": levels,
        "context": {x: rep.context[x] for x in vars},
        "points": [],
    }
    if rep.run is not None:
        for label, s, st in rep.points():
            rec["points"].append({"point": label, **_state_record(st, levels, vars)})
        rec["final"] = _state_record(rep.final, levels, vars)
        rec["loops"] = [
            {"line": st.loop.span.line if st.loop.span else None, "iterations": st.iterations}
            for st in rep.run.loop_stats
        ]
    if rep.hs is not None:
        rec["hs"] = {x: rep.hs[x] for x in vars}
    leak = rep.leakage()
    if leak:
        rec["leakage"] = [
            [l, x, None if b is None else ("inf" if b == extnat.INF else b)] for (l, x), b in leak.items()
        ]
    rec["checks"] = [{"query": str(q), "verdict": v.value} for q, v in rep.verdicts]
    return rec


# --------------------------------------------------------------------------
# annotation
# --------------------------------------------------------------------------

_KEY_RE = re.compile(r"(\{[^}]*\}|[A-Za-z_]\w*)▸([A-Za-z_]\w*)(?::(∞|inf|\d+))?")


def _state_at(rep: Report, offset: int) -> ProductState:
    best, best_end = rep.run.initial, -1
    for s in statements(rep.program.body):
        sp = s.span
        if sp is None or sp.end > offset or sp.end <= best_end or id(s) not in rep.run.snapshots:
            continue
        best, best_end = rep.run.snapshots[id(s)], sp.end
    return best


def _default_keys(rep: Report, offset: int) -> list[tuple[Level, str]]:
    target = None
    for s in statements(rep.program.body):
        if s.span is not None and s.span.end <= offset and (target is None or s.span.end > target.span.end):
            target = s
    vars = sorted(mod_vars(target)) if target is not None else []
    if not vars:
        vars = list(rep.vars)
    return [(l, x) for l in _shown_levels(rep) for x in vars]


def _shown_levels(rep: Report) -> list[Level]:
    return [l for l in rep.lattice.sorted_levels if l != rep.lattice.top] or [rep.lattice.top]


def _render(rep: Report, s: ProductState, keys: list[tuple[Level, str]]) -> str:
    card = s.card if s.card is not None else from_dep(s.dep, rep.lattice.levels, rep.vars)
    return ", ".join(f"{l}▸{x}:{extnat.fmt(card[l, x])}" for l, x in keys if (l, x) in card)


def annotate(source: str, rep: Report) -> str:
    """Re-emit ``source`` with every constraint comment recomputed.

    Comments listing constraints keep their keys; blank ``//`` comments get
    the modified variables of the preceding statement. Other comments and
    ``//!`` config lines are copied verbatim. Statements without a
    following comment get one appended at the end of their last line.
    """
    if rep.run is None or (rep.final.card is None and rep.final.dep is None):
        raise ValueError("annotation needs the cardinality or dependence analysis")
    comments = rep.program.comments
    pieces: list[str] = []
    pos = 0
    for cm in comments:
        if cm.text.startswith("!"):
            continue
        keys = [(m.group(1), m.group(2)) for m in _KEY_RE.finditer(cm.text)]
        if not keys and cm.text.strip():
            continue
        if not keys:
            keys = _default_keys(rep, cm.offset)
        state = _state_at(rep, cm.offset)
        end = source.index("\n", cm.offset) if "\n" in source[cm.offset :] else len(source)
        pieces.append(source[pos : cm.offset])
        pieces.append("//" + _render(rep, state, keys))
        pos = end
    pieces.append(source[pos:])
    out = "".join(pieces)
    if not any(not cm.text.startswith("!") and _KEY_RE.search(cm.text) for cm in comments) and not any(
        not cm.text.startswith("!") and not cm.text.strip() for cm in comments
    ):
        out = _annotate_fresh(out, rep)
    return out


def _annotate_fresh(source: str, rep: Report) -> str:
    """Append one constraint comment per statement-ending line."""
    lines = source.split("\n")
    by_line: dict[int, Command] = {}
    for s in statements(rep.program.body):
        if s.span is not None and id(s) in rep.run.snapshots:
            prev = by_line.get(s.span.end_line)
            if prev is None or s.span.end >= prev.span.end:
                by_line[s.span.end_line] = s
    out = []
    head = ", ".join(_render_keys(rep, rep.run.initial, list(rep.vars)))
    out.append("//" + head)
    for i, text in enumerate(lines, start=1):
        s = by_line.get(i)
        if s is None:
            out.append(text)
            continue
        vars = sorted(mod_vars(s)) or list(rep.vars)
        out.append(text + "//" + ", ".join(_render_keys(rep, rep.run.snapshots[id(s)], vars)))
    return "\n".join(out)


def _render_keys(rep: Report, s: ProductState, vars: list[str]) -> list[str]:
    return [_render(rep, s, [(l, x)]) for l in _shown_levels(rep) for x in vars]
