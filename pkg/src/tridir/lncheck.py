"""The let-normal checker: let, slack-let and slack-var replace directL."""
from __future__ import annotations

from typing import Callable, Iterator

from .letnormal import wf_letnormal
from .search import (
    DEFAULT_FUEL,
    LET,
    SLACK_LET,
    SLACK_VAR,
    Alt,
    CheckOutcome,
    CheckP,
    IllFormed,
    ProofSearch,
    SynthOutcome,
    SynthP,
    maximal,
)
from .syntax import (
    Let,
    LinVar,
    Linear,
    Slack,
    SlackLet,
    Term,
    Type,
    TypingContext,
    fresh_name,
    linear_names,
    split_delta,
    subst,
)

# test hook: rewrites the candidate types for a let right-hand side
LetSynthHook = Callable[[Term, list[Type]], list[Type]]


class LetNormalChecker(ProofSearch):
    system = "let"

    def __init__(self, gamma: TypingContext, *, fuel: int = DEFAULT_FUEL, strategy: str = "heuristic",
                 let_synth_hook: LetSynthHook | None = None):
        super().__init__(gamma, fuel=fuel, strategy=strategy)
        self.let_synth_hook = let_synth_hook

    def _precheck(self, delta, e):
        if not wf_letnormal(e):
            raise IllFormed(f"not a let-normal term: {e}")
        for ent in delta:
            if isinstance(ent, Slack) and not wf_letnormal(ent.rhs):
                raise IllFormed(f"not a let-normal term: {ent.rhs}")
        super()._precheck(delta, e)

    def _rule_alts(self, g, d, e, goal) -> Iterator[Alt]:
        if isinstance(e, (Let, SlackLet)):
            e = self._unclash(d, e)
        if self.exhaustive:
            yield from super()._rule_alts(g, d, e, goal)
            yield from self._let_alts(g, d, e, goal)
            for ent in d:
                if isinstance(ent, Slack):
                    yield from self._discharge_alts(g, d, e, goal, ent)
            return
        if isinstance(e, SlackLet):
            # moving the binding into the context loses nothing
            yield from self._let_alts(g, d, e, goal)
            return
        needed = self._needed(d, e)
        if needed:
            # only rules that keep the subject intact may run before a needed discharge
            yield from self._intro_alts(g, d, e, goal)
            yield from self._discharge_alts(g, d, e, goal, needed[0])
            return
        yield from super()._rule_alts(g, d, e, goal)
        yield from self._let_alts(g, d, e, goal)

    @staticmethod
    def _unclash(d, e):
        taken = {ent.name for ent in d}
        if e.var not in taken:
            return e
        new = fresh_name(e.var, taken | linear_names(e))
        return type(e)(new, e.rhs, subst(e.body, LinVar(e.var), LinVar(new)))

    @staticmethod
    def _needed(d, e) -> list[Slack]:
        slack = [ent for ent in d if isinstance(ent, Slack)]
        if not slack:
            return []
        used = set((e.rhs if isinstance(e, Let) else e).free_linear)
        return [ent for ent in slack if ent.name in used]

    def _let_alts(self, g, d, e, goal) -> Iterator[Alt]:
        if isinstance(e, SlackLet):
            yield Alt(SLACK_LET, {}, (CheckP(g, d + (Slack(e.var, e.rhs),), e.body, goal),))
            return
        if not isinstance(e, Let):
            return
        d1, d2 = split_delta(d, e.rhs)
        types = list(self._synth_set(g, d1, e.rhs))
        if self.let_synth_hook is not None:
            types = list(self.let_synth_hook(e.rhs, types))
        if not self.exhaustive:
            types = maximal(types)
        for t in types:
            yield Alt(LET, {}, (SynthP(g, d1, e.rhs, t), CheckP(g, d2 + (Linear(e.var, t),), e.body, goal)))

    def _discharge_alts(self, g, d, e, goal, ent: Slack) -> Iterator[Alt]:
        rest = tuple(x for x in d if x.name != ent.name)
        d1, d2 = split_delta(rest, ent.rhs)
        types = list(self._synth_set(g, d1, ent.rhs))
        if not self.exhaustive:
            types = maximal(types)
        for t in types:
            yield Alt(
                SLACK_VAR,
                {"var": ent.name},
                (SynthP(g, d1, ent.rhs, t), CheckP(g, d2 + (Linear(ent.name, t),), e, goal)),
            )


def ln_check(gamma: TypingContext, delta, e: Term, goal: Type, fuel: int = DEFAULT_FUEL,
             strategy: str = "heuristic", let_synth_hook: LetSynthHook | None = None) -> CheckOutcome:
    checker = LetNormalChecker(gamma, fuel=fuel, strategy=strategy, let_synth_hook=let_synth_hook)
    return checker.check(e, goal, delta)


def ln_synth(gamma: TypingContext, delta, e: Term, fuel: int = DEFAULT_FUEL,
             strategy: str = "heuristic") -> SynthOutcome:
    return LetNormalChecker(gamma, fuel=fuel, strategy=strategy).synth(e, delta)
