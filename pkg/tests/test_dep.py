import random

from hypothesis import given
from hypothesis import strategies as st

from hyperflow import listing
from hyperflow.dep import (
    DepDomain,
    agree_expr,
    alpha_hs,
    close,
    dep_analyze,
    dep_guard_refine,
    dep_join,
    dep_order,
    gamma_hs,
    hs_typecheck,
    initial_dep,
    is_well_formed,
)
from hyperflow.gen import random_context, random_lattice, random_program, small_lattices
from hyperflow.lang import Assign, IntLit, parse_expr, parse_program
from hyperflow.lattice import diamond, parse_config, two_point

LAT = two_point()


def run_listing(name, improved=False):
    src = listing(name)
    p = parse_program(src)
    lat, ctx = parse_config(src).resolve(p.vars)
    return dep_analyze(p.body, initial_dep(lat, ctx, p.vars), lat, p.vars, improved_guards=improved)


def test_order_and_join():
    D = frozenset({("L", "x"), ("H", "x")})
    assert dep_order(D, frozenset())
    assert dep_join(D, frozenset({("H", "x")})) == {("H", "x")}
    assert dep_order(D, D)


def test_agree_expr():
    D = frozenset({("L", "x")})
    assert agree_expr(IntLit(3), "L", frozenset())
    assert agree_expr(parse_expr("x"), "L", D)
    assert not agree_expr(parse_expr("y"), "L", D)
    assert not agree_expr(parse_expr("x + y"), "L", D)
    assert agree_expr(parse_expr("x + y"), "L", D | {("L", "y")})


def test_guard_refine():
    D = frozenset({("L", "x")})
    assert dep_guard_refine(parse_expr("x == y"), D, LAT) == close({("L", "x"), ("L", "y")}, LAT)
    assert dep_guard_refine(parse_expr("x < y"), D, LAT) == D
    assert dep_guard_refine(parse_expr("x == x"), close(D, LAT), LAT) == close(D, LAT)
    assert dep_guard_refine(parse_expr("y == x"), D, LAT) == dep_guard_refine(parse_expr("x == y"), D, LAT)


def test_listing1_x_depends_on_secret():
    d = run_listing("listing1")
    assert ("L", "x") not in d and ("H", "x") in d


def test_constant_assignment_agrees_everywhere():
    d = dep_analyze(Assign("x", IntLit(5)), frozenset(), LAT, ["x"])
    assert d == {("L", "x"), ("H", "x")}


def test_listing4_improved():
    d = run_listing("listing4", improved=True)
    assert ("L", "secret") in d and ("L", "o") in d
    d = run_listing("listing4")
    assert ("L", "secret") not in d and ("L", "o") not in d


def test_hs_examples():
    env = {"h": "H", "x": "L", "y": "L", "secret": "H"}
    assert hs_typecheck(parse_program("x := h").body, "L", env, LAT)["x"] == "H"
    c = parse_program("if (h == 0) then { x := 0 } else { skip }").body
    assert hs_typecheck(c, "L", env, LAT)["x"] == "H"
    p = parse_program(listing("listing5"))
    assert hs_typecheck(p.body, "L", {"secret": "H", "x": "L", "y": "L"}, LAT)["x"] == "H"


def test_hs_loop_fixpoint():
    env = {"h": "H", "a": "L", "b": "L"}
    c = parse_program("while (a < 3) do { b := a; a := h }").body
    out = hs_typecheck(c, "L", env, LAT)
    assert out["a"] == "H" and out["b"] == "H"


def test_alpha_gamma_hs():
    lat = diamond()
    for env in ({"x": "L", "y": "M1"}, {"x": "H", "y": "M2"}):
        assert alpha_hs(gamma_hs(env, lat), lat, env) == env
    assert alpha_hs(frozenset({("H", "x")}), LAT, ["x", "y"]) == {"x": "H", "y": "H"}


def test_alpha_hs_is_isomorphism_on_well_formed_sets():
    lat = diamond()
    ups = [frozenset(), *(frozenset(lat.up(l)) for l in lat.levels)]
    for ux in ups:
        for uy in ups:
            D = frozenset({(l, "x") for l in ux} | {(l, "y") for l in uy})
            if not ux or not uy:
                continue
            assert gamma_hs(alpha_hs(D, lat, ["x", "y"]), lat) == D


def _random_cases(n, seed):
    rng = random.Random(seed)
    for _ in range(n):
        c, vars = random_program(rng)
        lat = random_lattice(rng)
        ctx = random_context(rng, lat, vars)
        yield c, vars, lat, ctx


def test_well_formedness_preserved():
    for c, vars, lat, ctx in _random_cases(200, 11):
        for improved in (False, True):
            assert is_well_formed(dep_analyze(c, initial_dep(lat, ctx, vars), lat, vars, improved_guards=improved), lat)


def test_hs_precision_sample():
    for c, vars, lat, ctx in _random_cases(200, 12):
        d = dep_analyze(c, initial_dep(lat, ctx, vars), lat, vars)
        hs = hs_typecheck(c, lat.bottom, ctx, lat)
        got = alpha_hs(d, lat, vars)
        assert all(lat.leq(got[x], hs[x]) for x in vars)


def _random_dep(rng, lat, vars):
    return close({(l, x) for l in lat.levels for x in vars if rng.random() < 0.4}, lat)


@given(st.integers(0, 2**20))
def test_transfers_monotone(seed):
    rng = random.Random(seed)
    c, vars = random_program(rng)
    lat = random_lattice(rng)
    hi = _random_dep(rng, lat, vars)
    lo = hi | _random_dep(rng, lat, vars)  # lo ⊑ hi: more constraints
    for improved in (False, True):
        r_lo = dep_analyze(c, lo, lat, vars, improved_guards=improved)
        r_hi = dep_analyze(c, hi, lat, vars, improved_guards=improved)
        assert dep_order(r_lo, r_hi)


def test_domain_assign_drops_old_constraints():
    dom = DepDomain(LAT, ["x", "h"])
    d = dom.assign(frozenset({("L", "x"), ("H", "x"), ("H", "h")}), "x", parse_expr("h"))
    assert d == {("H", "x"), ("H", "h")}
