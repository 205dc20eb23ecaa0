"""End-to-end acceptance checks.  Each test prints exactly one PASS/FAIL line."""
import random
import time
from dataclasses import dataclass, field, replace

import numpy as np
import pytest

from tridir.differential import DEFAULT_GAMMA, Signature, enumerate_terms, random_terms, run_differential
from tridir.evaluator import evaluate
from tridir.letnormal import Measure, embed, measure, translate, unwind, wf_letnormal
from tridir.lncheck import ln_check
from tridir.parser import parse, parse_type
from tridir.search import Verdict
from tridir.subtyping import subtype
from tridir.syntax import BOT, App, Arrow, Base, Fix, Intersect, Lam, Let, Term, alpha_eq, enumerate_types, free_vars
from tridir.tri import tri_check
from tridir.validate import replays, validate

# pinned budgets
EXAMPLE_SECONDS = 1.0
EXAMPLE_FUEL = 10_000
CORPUS_SECONDS = 600.0
SUBTYPING_SECONDS = 60.0
EXHAUSTIVE_SIZE = 7
RANDOM_COUNT, RANDOM_SIZE, RANDOM_DENSITY, RANDOM_SEED = 500, 12, 0.5, 2024
CANONICAL_COUNT = 1000
EVAL_STEPS = 1000

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

ANTI_VALUE = parse("""
type int;
val omega : int -> bot;
val x : int;
(fix u => u) (omega x)
""")

# derivations emitted by the worked examples; the corpus adds its own
EMITTED: list[tuple[str, object]] = []


def report(capsys, n: int, name: str, ok: bool, detail: str):
    with capsys.disabled():
        print(f"\nACCEPTANCE {n} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


@dataclass
class CorpusRun:
    report: object = None
    seconds: float = 0.0
    accepted: int = 0
    replay_failures: list = field(default_factory=list)
    closed_accepted: dict = field(default_factory=dict)


@pytest.fixture(scope="module")
def corpus():
    """One pass over the exhaustive and random corpora, validating every accepted derivation on the way."""
    run = CorpusRun()
    side = [0.0]

    def on_record(rec):
        t0 = time.perf_counter()
        for outcome, system in ((rec.tri, "tri"), (rec.ln, "let")):
            if outcome.accepted:
                run.accepted += 1
                if not replays(outcome.derivation, system):
                    run.replay_failures.append((system, rec.term, rec.type))
        if rec.tri.accepted and not free_vars(rec.term):
            run.closed_accepted.setdefault(rec.term, rec.type)
        side[0] += time.perf_counter() - t0

    sig = replace(Signature(), max_size=EXHAUSTIVE_SIZE)
    rsig = replace(sig, max_size=RANDOM_SIZE, density=RANDOM_DENSITY, seed=RANDOM_SEED)
    t0 = time.perf_counter()
    rep = run_differential(enumerate_terms(sig), sig.check_types, DEFAULT_GAMMA, on_record=on_record)
    rep.merge(run_differential(random_terms(rsig, RANDOM_COUNT), sig.check_types, DEFAULT_GAMMA,
                               on_record=on_record))
    run.seconds = time.perf_counter() - t0 - side[0]
    run.report = rep
    return run


def test_1_map_filter_in_both_systems(capsys):
    goal = parse_type("some \\/ none")
    tri, t1 = timed(tri_check, MAPFILTER.gamma, (), MAPFILTER.term, goal, fuel=EXAMPLE_FUEL)
    ln, t2 = timed(ln_check, MAPFILTER.gamma, (), embed(*translate(MAPFILTER.term)), goal, fuel=EXAMPLE_FUEL)
    EMITTED.extend([("tri", tri.derivation), ("let", ln.derivation)])
    ok = tri.accepted and ln.accepted and t1 < EXAMPLE_SECONDS and t2 < EXAMPLE_SECONDS
    report(capsys, 1, "map/filter", ok,
           f"tri {tri.verdict.value} {tri.steps} steps {t1:.3f}s, let {ln.verdict.value} {ln.steps} steps {t2:.3f}s")


def test_2_principal_synthesis(capsys):
    goal = Base("B")
    t = embed(*translate(PRINCIPAL.term))

    def projections_only(rhs, found):
        return [a for a in found if not isinstance(a, Intersect)] if rhs == PRINCIPAL.term.fn else found

    t0 = time.perf_counter()
    tri = tri_check(PRINCIPAL.gamma, (), PRINCIPAL.term, goal)
    ln = ln_check(PRINCIPAL.gamma, (), t, goal)
    forced = [ln_check(PRINCIPAL.gamma, (), t, goal, strategy=s, let_synth_hook=projections_only)
              for s in ("heuristic", "exhaustive")]
    elapsed = time.perf_counter() - t0
    EMITTED.extend([("tri", tri.derivation), ("let", ln.derivation)])
    bound = ln.derivation.children[0].judgment.type if ln.accepted else None
    ok = (tri.accepted and ln.accepted and bound == PRINCIPAL.gamma.lookup("x")
          and all(f.verdict is Verdict.REJECT for f in forced) and elapsed < EXAMPLE_SECONDS)
    report(capsys, 2, "principal synthesis", ok,
           f"tri {tri.verdict.value}, let {ln.verdict.value} binding x at {bound}, "
           f"projection-forced {[f.verdict.value for f in forced]}, {elapsed:.3f}s")


def test_3_soundness_and_completeness(capsys, corpus):
    rep = corpus.report
    ok = rep.ok and corpus.seconds < CORPUS_SECONDS
    report(capsys, 3, "differential agreement", ok,
           f"{rep.terms} terms, {rep.cases} cases, {len(rep.disagreements)} disagreements, "
           f"{len(rep.fuel_exhausted)} fuel-exhausted, {corpus.seconds:.0f}s")


def test_4_translation_is_canonical(capsys):
    everything = list(enumerate_terms(Signature()))
    half = CANONICAL_COUNT // 2
    sample = random.Random(4).sample(everything, half)
    sample += random_terms(replace(Signature(), max_size=RANDOM_SIZE, density=RANDOM_DENSITY, seed=4),
                           CANONICAL_COUNT - half)
    failures = []
    for e in sample:
        t = embed(*translate(e))
        if measure(t) != Measure(0, 0, 0, 0) or not wf_letnormal(t) or not alpha_eq(unwind(t), e):
            failures.append(e)
    report(capsys, 4, "canonical translation", not failures and len(sample) == CANONICAL_COUNT,
           f"{len(sample)} terms, {len(failures)} failures")


def _let_rhs(e: Term) -> list[Term]:
    match e:
        case Let(_, r, b):
            return [r] + _let_rhs(r) + _let_rhs(b)
        case App(f, a):
            return _let_rhs(f) + _let_rhs(a)
        case Lam(_, b) | Fix(_, b):
            return _let_rhs(b)
    return []


def test_5_anti_value_argument_stays_nested(capsys):
    bindings, body = translate(ANTI_VALUE.term)
    omega_x = ANTI_VALUE.term.arg
    top_rhs = [b.rhs for b in bindings]
    nested = (len(bindings) == 1 and isinstance(top_rhs[0], App) and isinstance(top_rhs[0].fn, Fix)
              and alpha_eq(unwind(top_rhs[0].arg), omega_x)
              and {str(r) for r in _let_rhs(top_rhs[0].arg)} >= {"omega", "x"})
    t = embed(bindings, body)
    goal = Base("int")
    tri = tri_check(ANTI_VALUE.gamma, (), ANTI_VALUE.term, goal)
    ln = ln_check(ANTI_VALUE.gamma, (), t, goal)
    ok = nested and tri.verdict is Verdict.REJECT and ln.verdict is Verdict.REJECT
    report(capsys, 5, "anti-value nesting", ok,
           f"top-level bindings {[str(b) for b in bindings]}, tri {tri.verdict.value}, let {ln.verdict.value}")


def test_6_subtyping(capsys):
    t0 = time.perf_counter()
    ts = enumerate_types(("P", "Q"), 3)
    n = len(ts)
    rel = np.zeros((n, n), dtype=np.float32)
    for i, a in enumerate(ts):
        for j, b in enumerate(ts):
            rel[i, j] = subtype(a, b)
    subtype.cache_clear()
    reflexive = bool(np.all(np.diag(rel) == 1))
    # A <= B and B <= C for some B, but not A <= C
    composed = (rel @ rel) > 0
    intransitive = int(np.count_nonzero(composed & (rel == 0)))
    bottom = bool(np.all(rel[ts.index(BOT)] == 1))
    P, Q, R = Base("P"), Base("Q"), Base("R")
    no_distrib = not subtype(Intersect(Arrow(P, Q), Arrow(P, R)), Arrow(P, Intersect(Q, R)))
    elapsed = time.perf_counter() - t0
    ok = reflexive and intransitive == 0 and bottom and no_distrib and elapsed < SUBTYPING_SECONDS
    report(capsys, 6, "subtyping", ok,
           f"{n} types, {int(rel.sum())} related pairs, reflexive {reflexive}, {intransitive} transitivity gaps, "
           f"bot least {bottom}, distributivity rejected {no_distrib}, {elapsed:.1f}s")


def test_7_progress(capsys, corpus):
    stuck = []
    for e in corpus.closed_accepted:
        if evaluate(e, EVAL_STEPS).status == "stuck":
            stuck.append(e)
    report(capsys, 7, "progress", not stuck and len(corpus.closed_accepted) > 0,
           f"{len(corpus.closed_accepted)} closed accepted terms, {len(stuck)} stuck")


def test_8_derivations_replay(capsys, corpus):
    failures = [(s, d) for s, d in EMITTED if d is None or validate(d, s)]
    total = corpus.accepted + len(EMITTED)
    bad = len(failures) + len(corpus.replay_failures)
    report(capsys, 8, "derivation replay", bad == 0 and total > 0, f"{total - bad}/{total} derivations replay")
