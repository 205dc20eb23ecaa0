"""
Backtracking proof search shared by the tridirectional and let-normal checkers.

Search runs in two passes.  The first pass decides judgments with memoised
booleans (and memoised synthesis sets); the second pass replays the winning
choices to build a :class:`Derivation`, hitting the memo tables all the way
down.  Memo keys rename free linear variables by order of occurrence, so
states reached by naming subterms in different orders are shared.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

from .subtyping import SubDerivation, subtype, subtype_derivation
from .syntax import (
    Anno,
    App,
    Arrow,
    Bot,
    Fix,
    FixVar,
    Intersect,
    Lam,
    LinVar,
    Linear,
    Slack,
    Term,
    Type,
    TypingContext,
    Union,
    Var,
    exposes_left_rule,
    ok_delta,
    ok_gamma,
    projections,
    rename_linear,
    show_delta,
    split_delta,
    synthesizing_form,
)

DEFAULT_FUEL = 100_000

# typing rule names
VAR = "var"
LINVAR = "linvar"
FIXVAR = "fixvar"
ARR_I = "arrI"
ARR_E = "arrE"
SUB = "sub"
FIX = "fix"
BOT_L = "botL"
CTX_ANNO = "ctx-anno"
AND_L1 = "andL1"
AND_L2 = "andL2"
AND_I = "andI"
AND_E1 = "andE1"
AND_E2 = "andE2"
OR_L = "orL"
OR_I1 = "orI1"
OR_I2 = "orI2"
DIRECT_L = "directL"
LET = "let"
SLACK_LET = "slack-let"
SLACK_VAR = "slack-var"

CHECK = "check"
SYNTH = "synth"


class Verdict(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    FUEL_EXHAUSTED = "fuel-exhausted"


class Strategy(str, enum.Enum):
    HEURISTIC = "heuristic"
    EXHAUSTIVE = "exhaustive"


class IllScoped(ValueError):
    """The subject mentions variables its contexts do not account for."""


class IllFormed(ValueError):
    """A let-normal subject violates the let-normal grammar."""


class OutOfFuel(Exception):
    pass


@dataclass(frozen=True)
class Judgment:
    gamma: TypingContext
    delta: tuple
    subject: Term
    mode: str
    type: Type

    def __str__(self):
        arrow = "<==" if self.mode == CHECK else "==>"
        return f"{self.gamma}; {show_delta(self.delta)} |- {self.subject} {arrow} {self.type}"


@dataclass(frozen=True, eq=False)
class Derivation:
    rule: str
    judgment: Judgment
    children: tuple = ()
    info: dict = field(default_factory=dict)

    def nodes(self) -> Iterator[Derivation]:
        yield self
        for c in self.children:
            if isinstance(c, Derivation):
                yield from c.nodes()

    def rules_used(self) -> set[str]:
        return {n.rule for n in self.nodes()}

    def pretty(self, indent: int = 0) -> str:
        pad = "  " * indent
        lines = [f"{pad}[{self.rule}] {self.judgment}"]
        for c in self.children:
            if isinstance(c, Derivation):
                lines.append(c.pretty(indent + 1))
            else:
                lines.append(f"{pad}  [{c.rule}] {c.sub} <= {c.sup}")
        return "\n".join(lines)


@dataclass(frozen=True)
class CheckOutcome:
    verdict: Verdict
    derivation: Derivation | None = None
    steps: int = 0

    @property
    def accepted(self) -> bool:
        return self.verdict is Verdict.ACCEPT


@dataclass(frozen=True)
class SynthOutcome:
    verdict: Verdict
    results: tuple[tuple[Type, Derivation], ...] = ()
    steps: int = 0

    @property
    def types(self) -> list[Type]:
        return [t for t, _ in self.results]


# premises of a rule instance
class CheckP(NamedTuple):
    gamma: TypingContext
    delta: tuple
    subject: Term
    goal: Type


class SynthP(NamedTuple):
    gamma: TypingContext
    delta: tuple
    subject: Term
    type: Type


class SubP(NamedTuple):
    sub: Type
    sup: Type


class CtxP(NamedTuple):
    required: TypingContext
    gamma: TypingContext


class Alt(NamedTuple):
    rule: str
    info: dict
    premises: tuple


def ctx_anno_satisfied(required: TypingContext, gamma: TypingContext) -> bool:
    """Every ``x:B`` in ``required`` is met by some ``x:B'`` in ``gamma`` with ``B' <= B``."""
    for name, want in required:
        have = gamma.lookup(name)
        if have is None or not subtype(have, want):
            return False
    return True


def maximal(types: list[Type]) -> list[Type]:
    """Drop types that are /\\-components of another candidate."""
    parts = set()
    for t in types:
        if isinstance(t, Intersect):
            parts.add(t.left)
            parts.add(t.right)
    return [t for t in types if t not in parts]


def _replace(delta: tuple, name: str, entry) -> tuple:
    return tuple(entry if ent.name == name else ent for ent in delta)


class ProofSearch:
    """Rules common to both systems; subclasses add their own checking rules."""

    system = ""

    def __init__(self, gamma: TypingContext, *, fuel: int = DEFAULT_FUEL, strategy: str = "heuristic"):
        self.gamma = gamma
        self.fuel = fuel
        self.strategy = Strategy(strategy)
        self.steps = 0
        self._check_memo: dict = {}
        self._synth_memo: dict = {}
        self._canon: dict = {}
        self._prechecked: set = set()

    @property
    def exhaustive(self) -> bool:
        return self.strategy is Strategy.EXHAUSTIVE

    # -- public entry points -------------------------------------------------

    def check(self, e: Term, goal: Type, delta: tuple = ()) -> CheckOutcome:
        delta = tuple(delta)
        self._precheck_once(delta, e)
        self.steps = 0
        try:
            if not self._check(self.gamma, delta, e, goal):
                return CheckOutcome(Verdict.REJECT, None, self.steps)
            d = self._derive(CheckP(self.gamma, delta, e, goal))
        except OutOfFuel:
            return CheckOutcome(Verdict.FUEL_EXHAUSTED, None, self.steps)
        return CheckOutcome(Verdict.ACCEPT, d, self.steps)

    def synth(self, e: Term, delta: tuple = ()) -> SynthOutcome:
        delta = tuple(delta)
        self._precheck_once(delta, e)
        self.steps = 0
        try:
            types = list(self._synth_set(self.gamma, delta, e))
            results = tuple((t, self._derive(SynthP(self.gamma, delta, e, t))) for t in types)
        except OutOfFuel:
            return SynthOutcome(Verdict.FUEL_EXHAUSTED, (), self.steps)
        verdict = Verdict.ACCEPT if results else Verdict.REJECT
        return SynthOutcome(verdict, results, self.steps)

    def _precheck_once(self, delta, e):
        if (delta, e) not in self._prechecked:
            self._precheck(delta, e)
            self._prechecked.add((delta, e))

    def _precheck(self, delta, e):
        if not ok_gamma(self.gamma, e):
            raise IllScoped(f"free variables of {e} are not all declared")
        if not ok_delta(delta, e):
            raise IllScoped(f"linear context {show_delta(delta)} does not match {e}")

    # -- decision pass -------------------------------------------------------

    def _tick(self):
        self.steps += 1
        if self.steps > self.fuel:
            raise OutOfFuel

    def _key(self, g, d, e, goal):
        if not d:
            return (g, e, (), goal)
        state = (g, d, e)
        canon = self._canon.get(state)
        if canon is None:
            canon = self._canon[state] = self._canonical(g, d, e)
        return canon + (goal,)

    def _canonical(self, g, d, e):
        slack = {ent.name: ent.rhs for ent in d if isinstance(ent, Slack)}
        order: list[str] = []
        seen: set[str] = set()
        todo = list(reversed(e.free_linear))
        while todo:
            n = todo.pop()
            if n in seen:
                continue
            seen.add(n)
            order.append(n)
            if n in slack:
                todo.extend(reversed(slack[n].free_linear))
        order += [ent.name for ent in d if ent.name not in seen]
        mapping = {n: f"#{i}" for i, n in enumerate(order)}
        by_name = {ent.name: ent for ent in d}
        canon = []
        for n in order:
            ent = by_name[n]
            if isinstance(ent, Linear):
                canon.append((mapping[n], ent.type))
            else:
                canon.append((mapping[n], rename_linear(ent.rhs, mapping)))
        return (g, rename_linear(e, mapping), tuple(canon))

    def _check(self, g, d, e, goal) -> bool:
        key = self._key(g, d, e, goal)
        hit = self._check_memo.get(key)
        if hit is not None:
            return hit
        self._tick()
        result = any(self._all_hold(alt.premises) for alt in self._check_alts(g, d, e, goal))
        self._check_memo[key] = result
        return result

    def _synth_set(self, g, d, e) -> dict[Type, None]:
        key = self._key(g, d, e, None)
        hit = self._synth_memo.get(key)
        if hit is not None:
            return hit
        self._tick()
        out: dict[Type, None] = {}
        for ty, alt in self._synth_heads(g, d, e):
            if ty in out:
                continue
            if self._all_hold(alt.premises):
                for p in projections(ty):
                    out.setdefault(p)
        self._synth_memo[key] = out
        return out

    def _all_hold(self, premises) -> bool:
        return all(self._holds(p) for p in premises)

    def _holds(self, p) -> bool:
        if isinstance(p, CheckP):
            return self._check(*p)
        if isinstance(p, SynthP):
            return p.type in self._synth_set(p.gamma, p.delta, p.subject)
        if isinstance(p, SubP):
            return subtype(p.sub, p.sup)
        if isinstance(p, CtxP):
            return ctx_anno_satisfied(p.required, p.gamma)
        raise TypeError(p)

    # -- derivation pass -----------------------------------------------------

    def _derive(self, p):
        if isinstance(p, CheckP):
            judgment = Judgment(p.gamma, p.delta, p.subject, CHECK, p.goal)
            alts = self._check_alts(*p)
        elif isinstance(p, SynthP):
            judgment = Judgment(p.gamma, p.delta, p.subject, SYNTH, p.type)
            alts = self._synth_alts_for(*p)
        elif isinstance(p, SubP):
            return subtype_derivation(p.sub, p.sup)
        elif isinstance(p, CtxP):
            return tuple(subtype_derivation(p.gamma.lookup(n), t) for n, t in p.required)
        else:
            raise TypeError(p)
        for alt in alts:
            if self._all_hold(alt.premises):
                children: list = []
                for q in alt.premises:
                    sub = self._derive(q)
                    children.extend(sub if isinstance(sub, tuple) else (sub,))
                return Derivation(alt.rule, judgment, tuple(children), alt.info)
        raise AssertionError(f"no derivation replays for {judgment}")

    def _synth_alts_for(self, g, d, e, target) -> Iterator[Alt]:
        for ty, alt in self._synth_heads(g, d, e):
            if ty == target:
                yield alt
        for t in self._synth_set(g, d, e):
            if isinstance(t, Intersect):
                if t.left == target:
                    yield Alt(AND_E1, {}, (SynthP(g, d, e, t),))
                if t.right == target:
                    yield Alt(AND_E2, {}, (SynthP(g, d, e, t),))

    # -- rules ---------------------------------------------------------------

    def is_value(self, e: Term) -> bool:
        from .syntax import is_value

        return is_value(e)

    def _synth_heads(self, g, d, e) -> Iterator[tuple[Type, Alt]]:
        match e:
            case Var(x) | FixVar(x):
                if not d and x in g:
                    yield g.lookup(x), Alt(VAR if isinstance(e, Var) else FIXVAR, {}, ())
            case LinVar(x):
                if len(d) == 1 and isinstance(d[0], Linear) and d[0].name == x:
                    yield d[0].type, Alt(LINVAR, {}, ())
            case App(f, a):
                d1, d2 = split_delta(d, f)
                for t in list(self._synth_set(g, d1, f)):
                    if isinstance(t, Arrow):
                        yield t.cod, Alt(ARR_E, {}, (SynthP(g, d1, f, t), CheckP(g, d2, a, t.dom)))
            case Anno(s, anns):
                for i, ann in enumerate(anns):
                    yield ann.type, Alt(CTX_ANNO, {"index": i}, (CtxP(ann.context, g), CheckP(g, d, s, ann.type)))

    def _check_alts(self, g, d, e, goal) -> Iterator[Alt]:
        linear = [ent for ent in d if isinstance(ent, Linear)]
        if not self.exhaustive:
            # bot and union assumptions are decomposed eagerly: both rules are invertible
            for ent in linear:
                if isinstance(ent.type, Bot):
                    yield Alt(BOT_L, {"var": ent.name}, ())
                    return
            for ent in linear:
                if isinstance(ent.type, Union):
                    yield self._or_left(g, d, e, goal, ent)
                    return
        else:
            for ent in linear:
                if isinstance(ent.type, Bot):
                    yield Alt(BOT_L, {"var": ent.name}, ())
                elif isinstance(ent.type, Union):
                    yield self._or_left(g, d, e, goal, ent)
        yield from self._rule_alts(g, d, e, goal)
        for ent in linear:
            if isinstance(ent.type, Intersect):
                for rule, part in ((AND_L1, ent.type.left), (AND_L2, ent.type.right)):
                    if self.exhaustive or exposes_left_rule(part):
                        new = _replace(d, ent.name, Linear(ent.name, part))
                        yield Alt(rule, {"var": ent.name}, (CheckP(g, new, e, goal),))

    def _or_left(self, g, d, e, goal, ent) -> Alt:
        left = _replace(d, ent.name, Linear(ent.name, ent.type.left))
        right = _replace(d, ent.name, Linear(ent.name, ent.type.right))
        return Alt(OR_L, {"var": ent.name}, (CheckP(g, left, e, goal), CheckP(g, right, e, goal)))

    def _rule_alts(self, g, d, e, goal) -> Iterator[Alt]:
        yield from self._intro_alts(g, d, e, goal)
        yield from self._sub_alts(g, d, e, goal)

    def _intro_alts(self, g, d, e, goal) -> Iterator[Alt]:
        if isinstance(e, Lam) and not d and isinstance(goal, Arrow):
            yield Alt(ARR_I, {}, (CheckP(g.extend(e.var, goal.dom), (), e.body, goal.cod),))
        if isinstance(e, Fix) and not d:
            yield Alt(FIX, {}, (CheckP(g.extend(e.var, goal), (), e.body, goal),))
        if isinstance(goal, Intersect) and self.is_value(e):
            yield Alt(AND_I, {}, (CheckP(g, d, e, goal.left), CheckP(g, d, e, goal.right)))
        if isinstance(goal, Union):
            yield Alt(OR_I1, {}, (CheckP(g, d, e, goal.left),))
            yield Alt(OR_I2, {}, (CheckP(g, d, e, goal.right),))

    def _sub_alts(self, g, d, e, goal) -> Iterator[Alt]:
        if not synthesizing_form(e):
            return
        for t in list(self._synth_set(g, d, e)):
            if subtype(t, goal):
                yield Alt(SUB, {}, (SynthP(g, d, e, t), SubP(t, goal)))
