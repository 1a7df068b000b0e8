import itertools
import random

from hyperflow.concrete import State, Trace, collect, initial_traces
from hyperflow.gen import random_program
from hyperflow.hyper import (
    alpha_agree,
    alpha_cardtr,
    alpha_crdv,
    alpha_deptr,
    crdtr,
    crdval,
    deptr,
    deptr_direct,
    guard_hyper,
    hyper_collect,
    in_gamma_cardtr,
    in_gamma_deptr,
    initially_l_equivalent,
    variety,
    variety_subsets,
)
from hyperflow.lang import IntLit, Var, parse_expr, parse_program
from hyperflow.lattice import two_point, universal_flow_lattice

LAT = two_point()


def tr(s):
    st = State(s)
    return Trace(st, st)


def test_hyper_skip_and_assign():
    T = initial_traces(["x"], [0, 1])
    TT = frozenset({T})
    assert hyper_collect(parse_program("skip").body, TT) == TT
    c = parse_program("x := 0").body
    assert hyper_collect(c, TT) == {collect(c, T)}


def test_hyper_loop_contains_collect():
    c = parse_program("while (x < 3) do { x := x + 1 }").body
    T = initial_traces(["x"], [0, 1, 2, 3])
    H = hyper_collect(c, {T})
    assert collect(c, T) in H
    # every iterate is kept, filtered by the exit guard
    assert len(H) > 1


def test_guard_hyper():
    T = initial_traces(["x"], [0, 1])
    assert guard_hyper(parse_expr("x == x"), {T}) == {T}
    assert guard_hyper(parse_expr("x != x"), {T, frozenset()}) == {frozenset()}
    assert guard_hyper(parse_expr("x == 1"), {T}) == {frozenset({tr({"x": 1})})}


def test_membership_small_sample():
    rng = random.Random(3)
    for _ in range(100):
        c, vars = random_program(rng)
        T = initial_traces(vars, (0, 1, 2))
        assert collect(c, T, 200) in hyper_collect(c, {T}, 200)


def test_initial_equivalence():
    ctx = {"h": "H", "y": "L"}
    assert initially_l_equivalent([], "L", ctx, LAT)
    assert initially_l_equivalent([tr({"h": 1, "y": 0})], "H", ctx, LAT)
    two = [tr({"h": 0, "y": 0}), tr({"h": 1, "y": 0})]
    assert initially_l_equivalent(two, "L", ctx, LAT)
    assert not initially_l_equivalent(two, "H", ctx, LAT)


def test_initial_equivalence_universal():
    lat, ctx = universal_flow_lattice(["x", "y", "z"])
    T = [tr({"x": 0, "y": 0, "z": 0}), tr({"x": 0, "y": 0, "z": 1})]
    assert initially_l_equivalent(T, "{x,y}", ctx, lat)
    assert not initially_l_equivalent(T, "{x,z}", ctx, lat)


def test_variety_examples():
    ctx = {"h": "H", "y": "L", "x": "H"}
    c = parse_program("x := (h % 2) + y").body
    T = collect(c, initial_traces(["h", "y", "x"], [0, 1, 2, 3]))
    T = frozenset(t for t in T if t.initial["y"] in (0, 1) and t.initial["x"] == 0)
    V = variety(Var("x"), "L", T, ctx, LAT)
    assert {len(v) for v in V} == {2}
    assert alpha_crdv(V) == alpha_crdv(variety_subsets(Var("x"), "L", T, ctx, LAT)) == 2
    assert variety(IntLit(7), "L", T, ctx, LAT) == {frozenset({7})}
    assert variety(Var("x"), "L", frozenset(), ctx, LAT) == frozenset()
    assert variety_subsets(Var("x"), "L", frozenset(), ctx, LAT) == {frozenset()}


def test_class_and_subset_variety_agree_through_abstractions():
    ctx = {"a": "L", "b": "H"}
    universe = sorted(initial_traces(["a", "b"], [0, 1]), key=repr)
    # add non-diagonal finals to get distinct values of b
    universe += [Trace(t.initial, t.final.set("b", 2)) for t in universe[:2]]
    for r in range(len(universe) + 1):
        for T in itertools.combinations(universe, r):
            for l in LAT.levels:
                for e in (Var("a"), Var("b"), parse_expr("a + b")):
                    vc = variety(e, l, T, ctx, LAT)
                    vs = variety_subsets(e, l, T, ctx, LAT)
                    assert alpha_crdv(vc) == alpha_crdv(vs)
                    assert alpha_agree(vc) == alpha_agree(vs)


def test_variety_monotone_in_level():
    ctx = {"a": "L", "b": "H"}
    T = initial_traces(["a", "b"], [0, 1, 2])
    for e in (Var("a"), Var("b"), parse_expr("a * b")):
        assert variety_subsets(e, "H", T, ctx, LAT) <= variety_subsets(e, "L", T, ctx, LAT)


def test_crdval_and_alpha():
    assert crdval({1, 2}) == 2
    assert crdval({1, 2} | {2, 3}) == 3 != max(crdval({1, 2}), crdval({2, 3}))
    assert crdval(set()) == 0
    assert alpha_crdv([{1}, {2, 3}]) == 2
    assert alpha_crdv([]) == 0
    assert alpha_agree([{5}]) and not alpha_agree([{1}, {1, 2}])


def test_crdtr_deptr_initial():
    ctx = {"h": "H", "y": "L"}
    T = initial_traces(["h", "y"], [0, 1, 2])
    c = crdtr(T, ctx, LAT, ["h", "y"])
    assert (c["L", "y"], c["L", "h"], c["H", "h"], c["H", "y"]) == (1, 3, 1, 1)
    assert deptr(T, ctx, LAT, ["h", "y"]) == {("L", "y"), ("H", "y"), ("H", "h")}
    assert deptr(T, ctx, LAT, ["h", "y"]) == deptr_direct(T, ctx, LAT, ["h", "y"])


def test_empty_trace_set():
    ctx = {"x": "H"}
    c = crdtr(frozenset(), ctx, LAT, ["x"])
    assert all(n == 0 for n in c.values())
    assert deptr(frozenset(), ctx, LAT, ["x"]) == {("L", "x"), ("H", "x")}


def test_trace_set_galois_membership():
    ctx = {"a": "L", "b": "H"}
    vars = ["a", "b"]
    base = initial_traces(vars, [0, 1])
    sets = [frozenset(s) for r in range(3) for s in itertools.combinations(sorted(base, key=repr), r)]
    for TT in itertools.combinations(sets, 2):
        a = alpha_cardtr(TT, ctx, LAT, vars)
        d = alpha_deptr(TT, ctx, LAT, vars)
        assert all(in_gamma_cardtr(T, a, ctx, LAT) for T in TT)
        assert all(in_gamma_deptr(T, d, ctx, LAT, vars) for T in TT)
    assert all(n == 0 for n in alpha_cardtr([], ctx, LAT, vars).values())
    assert alpha_deptr([], ctx, LAT, vars) == {(l, x) for l in LAT.levels for x in vars}
