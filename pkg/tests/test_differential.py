import random
from dataclasses import replace
from functools import lru_cache

import pytest

from tridir.differential import (
    DEFAULT_GAMMA,
    Signature,
    differential_check,
    enumerate_terms,
    gen_random_term,
    random_terms,
    run_differential,
)
from tridir.parser import parse_term, parse_type
from tridir.search import Verdict
from tridir.syntax import Anno, App, Fix, Lam, alpha_eq

SIG = Signature()


@lru_cache(maxsize=None)
def _count(n, ordinary, fixes, anns):
    """Closed-form recurrence for the number of terms, independent of the generator."""
    if n == 1:
        return ordinary + fixes
    total = _count(n - 1, ordinary + 1, fixes, anns) + _count(n - 1, ordinary, fixes + 1, anns)
    for i in range(1, n - 1):
        fn = _count(i, ordinary, fixes, anns) + (anns * _count(i - 1, ordinary, fixes, anns) if i >= 2 else 0)
        total += fn * _count(n - 1 - i, ordinary, fixes, anns)
    return total


@pytest.mark.parametrize("annotate", [False, True])
def test_enumeration_counts_match_recurrence(annotate):
    sig = replace(SIG, max_size=5)
    terms = list(enumerate_terms(sig, annotate=annotate))
    anns = len(sig.annotations) if annotate else 0
    assert len(terms) == sum(_count(n, 5, 0, anns) for n in range(1, 6))
    assert len(set(terms)) == len(terms)
    assert all(t.size <= 5 for t in terms)


def test_enumeration_starts_with_variables():
    assert [str(t) for t in enumerate_terms(replace(SIG, max_size=1))] == ["x", "f", "g", "h", "w"]


def test_no_two_enumerated_terms_are_alpha_equivalent():
    terms = list(enumerate_terms(replace(SIG, max_size=4)))
    for i, a in enumerate(terms):
        assert not any(alpha_eq(a, b) for b in terms[i + 1:])


def test_random_terms_are_reproducible():
    sig = replace(SIG, max_size=12, density=0.5, seed=7)
    assert random_terms(sig, 20) == random_terms(sig, 20)
    assert random_terms(sig, 20) != random_terms(replace(sig, seed=8), 20)
    assert gen_random_term(sig, random.Random(3)) == gen_random_term(sig, random.Random(3))


def _has_anno(e):
    match e:
        case Anno():
            return True
        case Lam(_, b) | Fix(_, b):
            return _has_anno(b)
        case App(f, a):
            return _has_anno(f) or _has_anno(a)
    return False


def test_density_controls_annotation():
    sig = replace(SIG, max_size=12)
    assert not any(_has_anno(t) for t in random_terms(replace(sig, density=0.0), 100))
    full = random_terms(replace(sig, density=1.0), 100)
    assert any(_has_anno(t) for t in full)
    assert all(t.size <= 12 and t.size >= 6 for t in full)


def test_single_case_agreement():
    for goal in ("P", "Q"):
        rec = differential_check(parse_term("g x"), parse_type(goal))
        assert rec.tri.verdict is Verdict.ACCEPT and rec.ln.verdict is Verdict.ACCEPT
    # intersection introduction is limited to values
    assert differential_check(parse_term("g x"), parse_type("P /\\ Q")).ln.verdict is Verdict.REJECT
    rec = differential_check(parse_term("fn v => g x"), parse_type("P -> P /\\ Q"))
    assert rec.tri.verdict is Verdict.REJECT and not rec.disagrees
    rec = differential_check(parse_term("f x"), parse_type("P"))
    assert rec.tri.verdict is Verdict.REJECT and not rec.disagrees


def test_union_argument_needs_both_branches():
    assert differential_check(parse_term("g h"), parse_type("Q")).tri.verdict is Verdict.REJECT
    assert differential_check(parse_term("w x"), parse_type("bot")).ln.verdict is Verdict.ACCEPT


def test_fuel_exhaustion_is_not_a_disagreement():
    rec = differential_check(parse_term("g (f x)"), parse_type("Q"), fuel=1)
    assert not rec.decided and not rec.disagrees


def test_small_corpus_agrees():
    sig = replace(SIG, max_size=4)
    report = run_differential(enumerate_terms(sig, annotate=True), sig.check_types, DEFAULT_GAMMA)
    assert report.ok, report.table()
    assert report.cases == report.terms * 30 and not report.fuel_exhausted
    assert report.outcomes[("accept", "accept")] > 0 and report.outcomes[("reject", "reject")] > 0
