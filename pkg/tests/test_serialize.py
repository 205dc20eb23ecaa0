import json
from pathlib import Path

from hypothesis import given, settings

from tridir.letnormal import Measure, embed, let_normal, translate
from tridir.lncheck import ln_check
from tridir.parser import parse, parse_type
from tridir.serialize import (
    bindings_from_json,
    bindings_to_json,
    delta_from_json,
    delta_to_json,
    derivation_from_json,
    derivation_to_json,
    measure_to_json,
    outcome_to_json,
    term_from_json,
    term_to_json,
    type_from_json,
    type_to_json,
)
from tridir.syntax import Base, Linear, Slack, Var
from tridir.tri import tri_check
from tridir.validate import replays

from conftest import source_terms, types
from test_tri import MAPFILTER

GOLDEN = Path(__file__).parent / "golden"


def test_translation_matches_golden():
    src = parse((GOLDEN / "nested_app.src").read_text())
    bindings, body = translate(src.term)
    golden = json.loads((GOLDEN / "nested_app_translation.json").read_text())
    assert bindings_to_json(bindings) == golden["bindings"]
    assert term_to_json(body) == golden["body"]
    assert term_from_json(golden["term"]) == embed(bindings, body)
    assert bindings_from_json(golden["bindings"]) == tuple(bindings)


def test_principal_derivation_matches_golden():
    src = parse((GOLDEN / "principal.src").read_text())
    out = ln_check(src.gamma, (), let_normal(src.term), Base("B"))
    golden = json.loads((GOLDEN / "principal_let_derivation.json").read_text())
    assert outcome_to_json(out) == golden
    assert replays(derivation_from_json(golden["derivation"]), "let")


def test_derivation_round_trip_with_holes():
    d = tri_check(MAPFILTER.gamma, (), MAPFILTER.term, parse_type("some \\/ none")).derivation
    data = json.loads(json.dumps(derivation_to_json(d)))
    back = derivation_from_json(data)
    assert derivation_to_json(back) == data
    assert replays(back, "tri")


def test_delta_and_measure():
    delta = (Linear("a", Base("P")), Slack("b", Var("f")))
    assert delta_from_json(json.loads(json.dumps(delta_to_json(delta)))) == delta
    assert measure_to_json(Measure(1, 0, 2, 3)) == {"unbound_synth": 1, "brittle": 0, "prickly": 2, "transposed": 3}


@settings(max_examples=200, deadline=None)
@given(types())
def test_types_round_trip(t):
    assert type_from_json(type_to_json(t)) == t


@settings(max_examples=200, deadline=None)
@given(source_terms(max_size=12))
def test_terms_round_trip(e):
    for t in (e, let_normal(e)):
        assert term_from_json(json.loads(json.dumps(term_to_json(t)))) == t
