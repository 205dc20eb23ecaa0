import pytest
from hypothesis import given, settings

from tridir.differential import DEFAULT_GAMMA
from tridir.parser import parse, parse_term, parse_type
from tridir.search import Verdict
from tridir.syntax import EMPTY, Base, Intersect, Lam, Linear, LinVar, TypingContext, Var, enumerate_types
from tridir.tri import IllScoped, TriChecker, ctx_anno_satisfied, tri_check, tri_synth
from tridir.validate import validate

from conftest import source_terms

MAPFILTER = parse("""
type int; type some; type none;
val map : (int -> int) -> (some -> some) /\\ (none -> none);
val f : int -> int;
val filter : int -> some \\/ none;
val n : int;
map f (filter n)
""")

PRINCIPAL = parse("""
type A1; type A2; type B;
val x : (A1 -> B) /\\ (A2 -> B);
val y : A1 \\/ A2;
x y
""")

CHECK_TYPES = enumerate_types("PQ", 2)


def test_map_filter_checks():
    out = tri_check(MAPFILTER.gamma, (), MAPFILTER.term, parse_type("some \\/ none"))
    assert out.verdict is Verdict.ACCEPT
    assert {"directL", "orL", "andE1", "andE2"} <= out.derivation.rules_used()
    assert validate(out.derivation, "tri") == []


def test_map_filter_needs_the_union():
    assert tri_check(MAPFILTER.gamma, (), MAPFILTER.term, parse_type("some")).verdict is Verdict.REJECT


def test_principal_example_checks():
    out = tri_check(PRINCIPAL.gamma, (), PRINCIPAL.term, Base("B"))
    assert out.verdict is Verdict.ACCEPT
    names = [n.info["var"] for n in out.derivation.nodes() if n.rule == "directL"]
    assert names, "y must be named before the union can be split"


def test_identity():
    assert tri_check(EMPTY, (), Lam("x", Var("x")), parse_type("P -> P")).accepted


def test_fix_blocks_naming_the_argument():
    gamma = TypingContext.of({"w": parse_type("int -> bot"), "x": Base("int")})
    out = tri_check(gamma, (), parse_term("(fix u => u) (w x)"), Base("P"), strategy="exhaustive")
    assert out.verdict is Verdict.REJECT


def test_bot_in_evaluation_position_checks_anything():
    gamma = TypingContext.of({"w": parse_type("int -> bot"), "x": Base("int"), "f": parse_type("P -> P")})
    assert tri_check(gamma, (), parse_term("f (w x)"), Base("Q")).accepted


def test_synth_variable_with_projections():
    gamma = TypingContext.of({"x": parse_type("(s -> s) /\\ (n -> n)")})
    assert tri_synth(gamma, (), Var("x")).types == [parse_type(t) for t in ("(s -> s) /\\ (n -> n)", "s -> s", "n -> n")]


def test_synth_annotation_and_lambda():
    e = parse_term("(fn x => x : |- P -> P)")
    assert tri_synth(EMPTY, (), e).types == [parse_type("P -> P")]
    out = tri_synth(EMPTY, (), Lam("x", Var("x")))
    assert out.verdict is Verdict.REJECT and out.types == []


def test_contextual_annotations_pick_the_supported_entry():
    gamma = TypingContext.of({"x": Base("odd")})
    e = parse_term("(x : x:even |- even, x:odd |- odd)")
    assert tri_synth(gamma, (), e).types == [Base("odd")]


def test_ctx_anno_satisfied():
    odd, even = Base("odd"), Base("even")
    assert ctx_anno_satisfied(EMPTY, TypingContext.of({"y": odd}))
    assert ctx_anno_satisfied(TypingContext.of({"x": odd}), TypingContext.of({"x": odd}))
    assert not ctx_anno_satisfied(TypingContext.of({"x": odd}), TypingContext.of({"x": even}))
    assert ctx_anno_satisfied(TypingContext.of({"x": parse_type("odd \\/ even")}), TypingContext.of({"x": odd}))


def test_ill_scoped_is_an_error():
    with pytest.raises(IllScoped):
        tri_check(EMPTY, (), Var("x"), Base("P"))
    with pytest.raises(IllScoped):
        tri_check(EMPTY, (Linear("a", Base("P")),), Lam("x", Var("x")), Base("P"))


def test_linear_assumptions():
    a = Linear("a", parse_type("P \\/ Q"))
    assert tri_check(EMPTY, (a,), LinVar("a"), parse_type("Q \\/ P")).accepted
    assert tri_check(EMPTY, (Linear("a", parse_type("bot")),), LinVar("a"), Base("Q")).accepted


def test_fuel_exhaustion_is_not_rejection():
    out = tri_check(MAPFILTER.gamma, (), MAPFILTER.term, parse_type("some \\/ none"), fuel=5)
    assert out.verdict is Verdict.FUEL_EXHAUSTED


def test_fuel_monotone():
    goal = parse_type("some \\/ none")
    need = tri_check(MAPFILTER.gamma, (), MAPFILTER.term, goal).steps
    for fuel in range(need - 3, need + 5):
        out = tri_check(MAPFILTER.gamma, (), MAPFILTER.term, goal, fuel=fuel)
        assert out.accepted == (fuel >= need)
        assert out.verdict in (Verdict.ACCEPT, Verdict.FUEL_EXHAUSTED)


@settings(max_examples=60, deadline=None)
@given(source_terms(max_size=9))
def test_accepted_derivations_replay(e):
    checker = TriChecker(DEFAULT_GAMMA)
    for goal in CHECK_TYPES:
        out = checker.check(e, goal)
        if out.accepted:
            assert validate(out.derivation, "tri") == []
            for node in out.derivation.nodes():
                if node.rule == "directL":
                    assert not isinstance(node.children[0].judgment.subject, LinVar)


@settings(max_examples=40, deadline=None)
@given(source_terms(max_size=7))
def test_strategies_agree(e):
    fast, full = TriChecker(DEFAULT_GAMMA), TriChecker(DEFAULT_GAMMA, strategy="exhaustive")
    for goal in CHECK_TYPES:
        assert fast.check(e, goal).verdict is full.check(e, goal).verdict


@settings(max_examples=40, deadline=None)
@given(source_terms(max_size=8))
def test_memo_reuse_does_not_change_answers(e):
    shared = TriChecker(DEFAULT_GAMMA)
    for goal in CHECK_TYPES[::3]:
        assert shared.check(e, goal).verdict is tri_check(DEFAULT_GAMMA, (), e, goal).verdict


def test_intersection_introduction_needs_a_value():
    gamma = TypingContext.of({"g": parse_type("(P -> Q) /\\ (P -> P)"), "x": Base("P")})
    goal = Intersect(Base("Q"), Base("P"))
    assert not tri_check(gamma, (), parse_term("g x"), goal).accepted
    out = tri_check(gamma, (), parse_term("fn y => g y"), parse_type("(P -> Q) /\\ (P -> P)"))
    assert out.accepted and "andI" in out.derivation.rules_used()
