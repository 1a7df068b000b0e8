import pytest
from hypothesis import given

from hyperflow import listing
from hyperflow.lang import (
    Assign,
    BinArith,
    Compare,
    If,
    IntLit,
    NestedComparisonError,
    ParseError,
    Seq,
    Skip,
    Var,
    While,
    format_command,
    format_expr,
    mod_vars,
    parse_expr,
    parse_program,
    statements,
)
from strategies import arith, commands, guards


def test_skip_program():
    p = parse_program("skip")
    assert p.vars == ()
    assert p.body == Skip()


def test_assign_sequence():
    p = parse_program("x := 1; y := x + 2")
    assert p.body == Seq(Assign("x", IntLit(1)), Assign("y", BinArith("+", Var("x"), IntLit(2))))
    assert p.vars == ("x", "y")


def test_listing1_shape():
    p = parse_program(listing("listing1"))
    assert p.body == If(Compare(">=", Var("y1"), Var("secret")), Assign("x", Var("y2")), Assign("x", Var("y3")))
    assert p.vars == ("y1", "secret", "x", "y2", "y3")


def test_vars_in_first_occurrence_order():
    assert parse_program("b := a; c := b * d").vars == ("b", "a", "c", "d")


def test_precedence_and_associativity():
    assert parse_expr("1 + 2 * 3") == BinArith("+", IntLit(1), BinArith("*", IntLit(2), IntLit(3)))
    assert parse_expr("8 - 4 - 2") == BinArith("-", BinArith("-", IntLit(8), IntLit(4)), IntLit(2))
    assert parse_expr("x - -1") == BinArith("-", Var("x"), IntLit(-1))


def test_trailing_separator_and_braceless_branches():
    p = parse_program("if (a < b) then a := 1 else { b := 2; };")
    assert p.body == If(Compare("<", Var("a"), Var("b")), Assign("a", IntLit(1)), Assign("b", IntLit(2)))


def test_brace_stands_in_for_separator():
    p = parse_program("while (x < 3) do { x := x + 1 }\ny := x")
    assert isinstance(p.body, Seq) and isinstance(p.body.first, While)


def test_comparison_assignment_allowed():
    assert parse_program("x := a == b").body == Assign("x", Compare("==", Var("a"), Var("b")))


@pytest.mark.parametrize("src", ["x := (a < b) + 1", "if (a < b < c) then skip else skip", "x := 1 + (a == b)"])
def test_nested_comparison_rejected(src):
    with pytest.raises(NestedComparisonError):
        parse_program(src)


@pytest.mark.parametrize(
    "src,line,col",
    [("x := ", 1, 6), ("skip;\nif (x) then skip else skip", 2, 6), ("x := 1 $", 1, 8), ("while x < 1 do skip", 1, 7)],
)
def test_syntax_errors_have_positions(src, line, col):
    with pytest.raises(ParseError) as ei:
        parse_program(src)
    assert (ei.value.line, ei.value.col) == (line, col)


def test_literal_range():
    parse_program("x := -9223372036854775808")
    with pytest.raises(ParseError):
        parse_program("x := 9223372036854775808")


def test_keywords_are_not_identifiers():
    with pytest.raises(ParseError):
        parse_program("skip := 1")


def test_mod_vars_examples():
    assert mod_vars(Skip()) == frozenset()
    assert mod_vars(If(Compare("<", Var("a"), IntLit(0)), Assign("x", IntLit(1)), Skip())) == {"x"}
    body = parse_program(listing("listing4")).body.first.body
    assert mod_vars(body) == {"x", "secret"}


@given(commands(), commands())
def test_mod_vars_of_seq_is_union(a, b):
    assert mod_vars(Seq(a, b)) == mod_vars(a) | mod_vars(b)


@given(commands())
def test_mod_vars_monotone_in_subcommands(c):
    for s in statements(c):
        assert mod_vars(s) <= mod_vars(c)


@given(commands())
def test_round_trip_commands(c):
    assert parse_program(format_command(c)).body == c


@given(arith)
def test_round_trip_arith(e):
    assert parse_expr(format_expr(e)) == e


@given(guards)
def test_round_trip_guards(b):
    assert parse_expr(format_expr(b)) == b


def test_comments_are_recorded():
    p = parse_program("x := 1; // note\n// second\nskip")
    assert [c.text for c in p.comments] == [" note", " second"]
    assert p.comments[1].line == 2


def test_spans_cover_statements():
    src = "x := 1;\nif (x < 2) then {\n  y := x\n} else { skip }"
    p = parse_program(src)
    stmts = list(statements(p.body))
    assert [src[s.span.start : s.span.end] for s in stmts][0] == "x := 1"
    assert src[stmts[1].span.start : stmts[1].span.end].endswith("skip }")
    assert stmts[1].span.line == 2 and stmts[1].span.end_line == 4
