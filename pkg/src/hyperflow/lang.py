"""Abstract syntax, parser and pretty-printer for the while-language.

Concrete syntax::

    program := stmt (";" stmt)* [";"]
    stmt    := "skip" | ident ":=" expr
             | "if" "(" cmpexpr ")" "then" branch "else" branch
             | "while" "(" cmpexpr ")" "do" branch
    branch  := "{" program "}" | stmt
    expr    := arith | cmpexpr
    cmpexpr := arith cmp arith
    arith   := term (("+" | "-") term)*
    term    := factor (("*" | "/" | "%") factor)*
    factor  := ["-"] int | ident | "(" arith ")"

Line comments start with ``//``. A trailing ``;`` before ``}`` or at the end
of input is accepted, as are brace-less single-statement branches; the
printer always emits braces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union

ARITH_OPS = ("+", "-", "*", "/", "%")
CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")
NEGATED_CMP = {"==": "!=", "!=": "==", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}
KEYWORDS = frozenset({"skip", "if", "then", "else", "while", "do"})

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Span:
    """Source extent of a statement: character offsets and 1-based lines."""

    start: int
    end: int
    line: int
    end_line: int


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinArith:
    op: str
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Compare:
    op: str
    lhs: "Expr"
    rhs: "Expr"


Expr = Union[IntLit, Var, BinArith, Compare]


@dataclass(frozen=True)
class Skip:
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Assign:
    target: str
    rhs: Expr
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Seq:
    first: "Command"
    second: "Command"


@dataclass(frozen=True)
class If:
    guard: Compare
    then_branch: "Command"
    else_branch: "Command"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class While:
    guard: Compare
    body: "Command"
    span: Span | None = field(default=None, compare=False, repr=False)


Command = Union[Skip, Assign, Seq, If, While]


@dataclass(frozen=True)
class Comment:
    text: str  # without the leading "//"
    offset: int
    line: int


@dataclass(frozen=True)
class Program:
    vars: tuple[str, ...]
    body: Command
    comments: tuple[Comment, ...] = field(default=(), compare=False, repr=False)
    source: str | None = field(default=None, compare=False, repr=False)


def negate(b: Compare) -> Compare:
    return Compare(NEGATED_CMP[b.op], b.lhs, b.rhs)


def seq(*cmds: Command) -> Command:
    """Right-nested sequence; the canonical shape produced by the parser."""
    if not cmds:
        return Skip()
    out = cmds[-1]
    for c in reversed(cmds[:-1]):
        out = Seq(c, out)
    return out


def expr_vars(e: Expr) -> Iterator[str]:
    if isinstance(e, Var):
        yield e.name
    elif isinstance(e, (BinArith, Compare)):
        yield from expr_vars(e.lhs)
        yield from expr_vars(e.rhs)


def command_vars(c: Command) -> Iterator[str]:
    """Identifiers of ``c`` in order of first (left-to-right) occurrence."""
    if isinstance(c, Assign):
        yield c.target
        yield from expr_vars(c.rhs)
    elif isinstance(c, Seq):
        yield from command_vars(c.first)
        yield from command_vars(c.second)
    elif isinstance(c, If):
        yield from expr_vars(c.guard)
        yield from command_vars(c.then_branch)
        yield from command_vars(c.else_branch)
    elif isinstance(c, While):
        yield from expr_vars(c.guard)
        yield from command_vars(c.body)


def ordered_vars(c: Command) -> tuple[str, ...]:
    return tuple(dict.fromkeys(command_vars(c)))


def mod_vars(c: Command) -> frozenset[str]:
    """Assignment targets occurring syntactically in ``c``.

    Over-approximates the variables whose final value may differ from their
    initial value.
    """
    if isinstance(c, Assign):
        return frozenset((c.target,))
    if isinstance(c, Seq):
        return mod_vars(c.first) | mod_vars(c.second)
    if isinstance(c, If):
        return mod_vars(c.then_branch) | mod_vars(c.else_branch)
    if isinstance(c, While):
        return mod_vars(c.body)
    return frozenset()


def statements(c: Command) -> Iterator[Command]:
    """All non-Seq statements of ``c``, pre-order."""
    if isinstance(c, Seq):
        yield from statements(c.first)
        yield from statements(c.second)
        return
    yield c
    if isinstance(c, If):
        yield from statements(c.then_branch)
        yield from statements(c.else_branch)
    elif isinstance(c, While):
        yield from statements(c.body)


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class NestedComparisonError(ParseError):
    pass


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>:=|==|!=|<=|>=|[<>+\-*/%(){};])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    start: int
    end: int
    line: int
    col: int


def _tokenize(source: str) -> tuple[list[_Tok], list[Comment]]:
    toks: list[_Tok] = []
    comments: list[Comment] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind == "comment":
            comments.append(Comment(text[2:], pos, line))
        elif kind != "ws":
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            toks.append(_Tok(kind, text, pos, m.end(), line, pos - line_start + 1))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", pos, pos, line, pos - line_start + 1))
    return toks, comments


class _Parser:
    def __init__(self, source: str):
        self.toks, self.comments = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def _error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.tok
        found = tok.text or "end of input"
        return ParseError(f"{msg}, found {found!r}", tok.line, tok.col)

    def _at(self, text: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text == text

    def _expect(self, text: str) -> _Tok:
        if not self._at(text):
            raise self._error(f"expected {text!r}")
        return self._advance()

    def _last_end(self) -> _Tok:
        return self.toks[self.i - 1]

    def _span(self, first: _Tok) -> Span:
        last = self._last_end()
        return Span(first.start, last.end, first.line, last.line)

    # statements ----------------------------------------------------------

    def program(self, closing: str | None) -> Command:
        stmts = [self.stmt()]
        while True:
            if self._at(";"):
                self._advance()
                if self.tok.kind == "eof" or (closing and self._at(closing)):
                    break
            elif not (self._last_end().text == "}" and self._starts_stmt()):
                # a closing brace may stand in for the separator
                break
            stmts.append(self.stmt())
        return seq(*stmts)

    def _starts_stmt(self) -> bool:
        t = self.tok
        return t.kind == "ident" or (t.kind == "kw" and t.text in ("skip", "if", "while"))

    def branch(self) -> Command:
        if self._at("{"):
            self._advance()
            body = self.program("}")
            self._expect("}")
            return body
        return self.stmt()

    def stmt(self) -> Command:
        first = self.tok
        if self._at("skip"):
            self._advance()
            return Skip(span=self._span(first))
        if self._at("if"):
            self._advance()
            self._expect("(")
            guard = self.cmpexpr()
            self._expect(")")
            self._expect("then")
            c1 = self.branch()
            self._expect("else")
            c2 = self.branch()
            return If(guard, c1, c2, span=self._span(first))
        if self._at("while"):
            self._advance()
            self._expect("(")
            guard = self.cmpexpr()
            self._expect(")")
            self._expect("do")
            body = self.branch()
            return While(guard, body, span=self._span(first))
        if first.kind == "ident":
            self._advance()
            self._expect(":=")
            rhs = self.expr()
            return Assign(first.text, rhs, span=self._span(first))
        raise self._error("expected a statement")

    # expressions ---------------------------------------------------------

    def expr(self) -> Expr:
        lhs = self.arith()
        if self.tok.kind == "op" and self.tok.text in CMP_OPS:
            op = self._advance().text
            rhs = self.arith()
            self._no_trailing_cmp()
            return Compare(op, lhs, rhs)
        return lhs

    def cmpexpr(self) -> Compare:
        lhs = self.arith()
        if not (self.tok.kind == "op" and self.tok.text in CMP_OPS):
            raise self._error("expected a comparison operator")
        op = self._advance().text
        rhs = self.arith()
        self._no_trailing_cmp()
        return Compare(op, lhs, rhs)

    def _no_trailing_cmp(self) -> None:
        if self.tok.kind == "op" and self.tok.text in CMP_OPS:
            raise NestedComparisonError("comparisons cannot be chained or nested", self.tok.line, self.tok.col)

    def arith(self) -> Expr:
        e = self.term()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self._advance().text
            e = BinArith(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.tok.kind == "op" and self.tok.text in ("*", "/", "%"):
            op = self._advance().text
            e = BinArith(op, e, self.factor())
        return e

    def factor(self) -> Expr:
        tok = self.tok
        if tok.kind == "int":
            self._advance()
            return IntLit(_check_int(int(tok.text), tok))
        if self._at("-") and self.toks[self.i + 1].kind == "int":
            self._advance()
            lit = self._advance()
            return IntLit(_check_int(-int(lit.text), lit))
        if tok.kind == "ident":
            self._advance()
            return Var(tok.text)
        if self._at("("):
            self._advance()
            e = self.arith()
            if self.tok.kind == "op" and self.tok.text in CMP_OPS:
                raise NestedComparisonError(
                    "comparisons are only allowed as guards or whole right-hand sides",
                    self.tok.line,
                    self.tok.col,
                )
            self._expect(")")
            return e
        raise self._error("expected an expression")


def _check_int(v: int, tok: _Tok) -> int:
    if not INT64_MIN <= v <= INT64_MAX:
        raise ParseError("integer literal out of 64-bit range", tok.line, tok.col)
    return v


def parse_program(source: str) -> Program:
    p = _Parser(source)
    body = p.program(None)
    if p.tok.kind != "eof":
        raise p._error("expected ';' or end of input")
    return Program(ordered_vars(body), body, tuple(p.comments), source)


def parse_expr(source: str) -> Expr:
    p = _Parser(source)
    e = p.expr()
    if p.tok.kind != "eof":
        raise p._error("unexpected input after expression")
    return e


# --------------------------------------------------------------------------
# Pretty-printer
# --------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "%": 2}


def _fmt_arith(e: Expr, ctx: int = 0, right: bool = False) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, BinArith):
        p = _PREC[e.op]
        s = f"{_fmt_arith(e.lhs, p)} {e.op} {_fmt_arith(e.rhs, p, right=True)}"
        return f"({s})" if p < ctx or (right and p == ctx) else s
    raise ValueError(f"comparison nested inside arithmetic: {e!r}")


def format_expr(e: Expr) -> str:
    if isinstance(e, Compare):
        return f"{_fmt_arith(e.lhs)} {e.op} {_fmt_arith(e.rhs)}"
    return _fmt_arith(e)


def _flatten(c: Command) -> list[Command]:
    if isinstance(c, Seq):
        return _flatten(c.first) + _flatten(c.second)
    return [c]


def format_command(c: Command, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    stmts = _flatten(c)
    for k, s in enumerate(stmts):
        sep = ";" if k < len(stmts) - 1 else ""
        if isinstance(s, Skip):
            lines.append(f"{pad}skip{sep}")
        elif isinstance(s, Assign):
            lines.append(f"{pad}{s.target} := {format_expr(s.rhs)}{sep}")
        elif isinstance(s, If):
            lines.append(f"{pad}if ({format_expr(s.guard)}) then {{")
            lines.append(format_command(s.then_branch, indent + 1))
            lines.append(f"{pad}}} else {{")
            lines.append(format_command(s.else_branch, indent + 1))
            lines.append(f"{pad}}}{sep}")
        elif isinstance(s, While):
            lines.append(f"{pad}while ({format_expr(s.guard)}) do {{")
            lines.append(format_command(s.body, indent + 1))
            lines.append(f"{pad}}}{sep}")
    return "\n".join(lines)


def format_program(p: Program | Command) -> str:
    return format_command(p.body if isinstance(p, Program) else p)
