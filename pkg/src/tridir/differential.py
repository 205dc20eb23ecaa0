"""
Differential testing: the tridirectional checker on a source term against the
let-normal checker on its translation.  Both systems should accept exactly
the same (term, type) pairs.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .letnormal import let_normal
from .lncheck import LetNormalChecker
from .search import DEFAULT_FUEL, CheckOutcome, Verdict
from .syntax import (
    Anno,
    App,
    Arrow,
    Base,
    ContextualAnnotation,
    Fix,
    FixVar,
    Intersect,
    Lam,
    Term,
    Type,
    TypingContext,
    Union,
    Var,
    BOT,
    EMPTY,
    enumerate_types,
)
from .tri import TriChecker

P, Q = Base("P"), Base("Q")

DEFAULT_GAMMA = TypingContext.of([
    ("x", P),
    ("f", Arrow(P, Q)),
    ("g", Intersect(Arrow(P, Q), Arrow(P, P))),
    ("h", Union(P, Q)),
    ("w", Arrow(P, BOT)),
])

DEFAULT_ANNOTATIONS = (
    (ContextualAnnotation(EMPTY, Arrow(P, P)),),
    (ContextualAnnotation(EMPTY, Arrow(P, Q)), ContextualAnnotation(EMPTY, Arrow(P, P))),
    (ContextualAnnotation(TypingContext.of([("x", P)]), Arrow(Q, P)), ContextualAnnotation(EMPTY, Arrow(Q, Q))),
)


@dataclass(frozen=True)
class Signature:
    atoms: tuple[str, ...] = ("P", "Q")
    gamma: TypingContext = DEFAULT_GAMMA
    check_types: tuple[Type, ...] = tuple(enumerate_types(("P", "Q"), 2))
    max_size: int = 7
    annotations: tuple[tuple[ContextualAnnotation, ...], ...] = DEFAULT_ANNOTATIONS
    density: float = 0.0
    seed: int = 0


# ---------------------------------------------------------------------------
# Term sources


def enumerate_terms(sig: Signature, annotate: bool = False) -> Iterator[Term]:
    """Every term of size <= ``sig.max_size`` over ``sig.gamma``, smallest first.

    Binders are named by nesting depth, so alpha-equivalent terms coincide and
    the stream has no duplicates.  With ``annotate`` the function position of
    an application may carry any of ``sig.annotations``.
    """
    anns = sig.annotations if annotate else ()
    base = tuple(sig.gamma.names())
    for n in range(1, sig.max_size + 1):
        yield from _terms(n, base, (), anns, True)


def _terms(n: int, ordinary: tuple, fixes: tuple, anns, fn_ok: bool) -> Iterator[Term]:
    depth = len(ordinary) + len(fixes)
    if n == 1:
        yield from (Var(x) for x in ordinary)
        yield from (FixVar(u) for u in fixes)
        return
    v, u = f"v{depth}", f"u{depth}"
    yield from (Lam(v, b) for b in _terms(n - 1, ordinary + (v,), fixes, anns, True))
    yield from (Fix(u, b) for b in _terms(n - 1, ordinary, fixes + (u,), anns, True))
    for i in range(1, n - 1):
        for fn in _fn_terms(i, ordinary, fixes, anns):
            for arg in _terms(n - 1 - i, ordinary, fixes, anns, True):
                yield App(fn, arg)


def _fn_terms(n: int, ordinary, fixes, anns) -> Iterator[Term]:
    yield from _terms(n, ordinary, fixes, anns, True)
    if anns and n >= 2:
        for s in _terms(n - 1, ordinary, fixes, anns, True):
            for a in anns:
                yield Anno(s, a)


def gen_random_term(sig: Signature, rng: random.Random | None = None) -> Term:
    """A random term of size <= ``sig.max_size``; application functions are annotated with probability ``density``."""
    rng = rng if rng is not None else random.Random(sig.seed)
    size = rng.randint(max(1, sig.max_size // 2), sig.max_size)
    return _gen(size, tuple(sig.gamma.names()), (), sig, rng)


def _gen(n: int, ordinary: tuple, fixes: tuple, sig: Signature, rng: random.Random) -> Term:
    depth = len(ordinary) + len(fixes)
    names = [Var(x) for x in ordinary] + [FixVar(u) for u in fixes]
    if n == 1 and names:
        return rng.choice(names)
    if n <= 1:
        raise ValueError("no variables in scope for a size-1 term")
    choices = ["lam", "fix"] + (["app"] * 3 if n >= 3 else [])
    kind = rng.choice(choices + ["lam"])
    if kind == "lam":
        v = f"v{depth}"
        return Lam(v, _gen(n - 1, ordinary + (v,), fixes, sig, rng))
    if kind == "fix":
        u = f"u{depth}"
        return Fix(u, _gen(n - 1, ordinary, fixes + (u,), sig, rng))
    i = rng.randint(1, n - 2)
    annotate = sig.annotations and i >= 2 and rng.random() < sig.density
    if annotate:
        fn = Anno(_gen(i - 1, ordinary, fixes, sig, rng), rng.choice(sig.annotations))
    else:
        fn = _gen(i, ordinary, fixes, sig, rng)
    return App(fn, _gen(n - 1 - i, ordinary, fixes, sig, rng))


def random_terms(sig: Signature, count: int) -> list[Term]:
    rng = random.Random(sig.seed)
    return [gen_random_term(sig, rng) for _ in range(count)]


# ---------------------------------------------------------------------------
# Running both checkers


@dataclass(frozen=True)
class CaseRecord:
    term: Term
    type: Type
    tri: CheckOutcome
    ln: CheckOutcome

    @property
    def decided(self) -> bool:
        return Verdict.FUEL_EXHAUSTED not in (self.tri.verdict, self.ln.verdict)

    @property
    def disagrees(self) -> bool:
        return self.decided and self.tri.verdict is not self.ln.verdict


class _Pair:
    """One checker per system for one term, reused across check types."""

    def __init__(self, gamma: TypingContext, e: Term, fuel: int, strategy: str):
        self.e = e
        self.lnt = let_normal(e)
        self.tri = TriChecker(gamma, fuel=fuel, strategy=strategy)
        self.ln = LetNormalChecker(gamma, fuel=fuel, strategy=strategy)

    def run(self, goal: Type) -> CaseRecord:
        return CaseRecord(self.e, goal, self.tri.check(self.e, goal), self.ln.check(self.lnt, goal))


def differential_check(e: Term, goal: Type, gamma: TypingContext = DEFAULT_GAMMA, fuel: int = DEFAULT_FUEL,
                       strategy: str = "heuristic") -> CaseRecord:
    return _Pair(gamma, e, fuel, strategy).run(goal)


@dataclass
class AgreementReport:
    cases: int = 0
    terms: int = 0
    outcomes: Counter = field(default_factory=Counter)
    disagreements: list[CaseRecord] = field(default_factory=list)
    fuel_exhausted: list[CaseRecord] = field(default_factory=list)
    records: list[CaseRecord] | None = None

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def add(self, rec: CaseRecord):
        self.cases += 1
        self.outcomes[(rec.tri.verdict.value, rec.ln.verdict.value)] += 1
        if rec.disagrees:
            self.disagreements.append(rec)
        elif not rec.decided:
            self.fuel_exhausted.append(rec)
        if self.records is not None:
            self.records.append(rec)

    def merge(self, other: AgreementReport):
        self.cases += other.cases
        self.terms += other.terms
        self.outcomes.update(other.outcomes)
        self.disagreements += other.disagreements
        self.fuel_exhausted += other.fuel_exhausted
        if self.records is not None and other.records is not None:
            self.records += other.records

    def table(self) -> str:
        rows = [f"terms {self.terms}  cases {self.cases}  disagreements {len(self.disagreements)}"
                f"  fuel-exhausted {len(self.fuel_exhausted)}",
                f"{'tri':<16}{'let':<16}count"]
        for (a, b), n in sorted(self.outcomes.items()):
            rows.append(f"{a:<16}{b:<16}{n}")
        for rec in self.disagreements:
            rows.append(f"DISAGREE {rec.term} against {rec.type}: tri {rec.tri.verdict.value}, let {rec.ln.verdict.value}")
        return "\n".join(rows)


def run_differential(terms: Iterable[Term], types: Iterable[Type], gamma: TypingContext = DEFAULT_GAMMA,
                     fuel: int = DEFAULT_FUEL, strategy: str = "heuristic", keep_records: bool = False,
                     on_record: Callable[[CaseRecord], None] | None = None) -> AgreementReport:
    """Both checkers on every (term, type) pair; ``on_record`` sees each case as it completes."""
    types = tuple(types)
    report = AgreementReport(records=[] if keep_records else None)
    for e in terms:
        report.terms += 1
        pair = _Pair(gamma, e, fuel, strategy)
        for goal in types:
            rec = pair.run(goal)
            report.add(rec)
            if on_record is not None:
                on_record(rec)
    return report
