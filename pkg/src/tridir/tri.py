"""The left tridirectional checker: structural rules, left rules and directL."""
from __future__ import annotations

from typing import Iterator

from .search import (
    DEFAULT_FUEL,
    DIRECT_L,
    Alt,
    CheckOutcome,
    CheckP,
    IllScoped,
    ProofSearch,
    SynthOutcome,
    SynthP,
    ctx_anno_satisfied,
    maximal,
)
from .syntax import (
    LinVar,
    Linear,
    Slack,
    Term,
    Type,
    TypingContext,
    decompose_eval,
    exposes_left_rule,
    fresh_name,
    is_value,
    linear_names,
    plug,
    split_delta,
    synthesizing_form,
)

__all__ = ["TriChecker", "tri_check", "tri_synth", "ctx_anno_satisfied", "IllScoped"]


class TriChecker(ProofSearch):
    system = "tri"

    def __init__(self, gamma: TypingContext, **kw):
        super().__init__(gamma, **kw)
        self._sites: dict = {}

    def _precheck(self, delta, e):
        if any(isinstance(ent, Slack) for ent in delta):
            raise IllScoped("slack entries are not part of the tridirectional system")
        super()._precheck(delta, e)

    def _rule_alts(self, g, d, e, goal) -> Iterator[Alt]:
        yield from super()._rule_alts(g, d, e, goal)
        yield from self._direct_alts(g, d, e, goal)

    def _direct_sites(self, d, e) -> list:
        # the naming sites of a state do not depend on the goal
        sites = self._sites.get((d, e))
        if sites is None:
            avoid = {ent.name for ent in d} | linear_names(e)
            name = fresh_name(f"n{len(d)}", avoid)
            sites = []
            for ctx, sub in decompose_eval(e):
                if isinstance(sub, LinVar) or not synthesizing_form(sub):
                    continue
                sites.append((ctx, sub, name, *split_delta(d, sub), plug(ctx, LinVar(name))))
            self._sites[(d, e)] = sites
        return sites

    def _direct_alts(self, g, d, e, goal) -> Iterator[Alt]:
        for ctx, sub, name, d1, d2, body in self._direct_sites(d, e):
            types = list(self._synth_set(g, d1, sub))
            if not self.exhaustive:
                # naming a value only pays off when a left rule can take its type apart
                if is_value(sub):
                    types = [t for t in types if exposes_left_rule(t)]
                types = maximal(types)
            for t in types:
                yield Alt(
                    DIRECT_L,
                    {"context": ctx, "var": name},
                    (SynthP(g, d1, sub, t), CheckP(g, d2 + (Linear(name, t),), body, goal)),
                )


def tri_check(gamma: TypingContext, delta, e: Term, goal: Type, fuel: int = DEFAULT_FUEL,
              strategy: str = "heuristic") -> CheckOutcome:
    return TriChecker(gamma, fuel=fuel, strategy=strategy).check(e, goal, delta)


def tri_synth(gamma: TypingContext, delta, e: Term, fuel: int = DEFAULT_FUEL,
              strategy: str = "heuristic") -> SynthOutcome:
    return TriChecker(gamma, fuel=fuel, strategy=strategy).synth(e, delta)
