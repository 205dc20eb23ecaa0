"""
Independent replay of typing derivations against the rule schemas.

Nothing here calls the search engine: every node is checked locally from its
own judgment and its children's judgments.
"""
from __future__ import annotations

from collections import Counter

from .search import CHECK, SYNTH, Derivation
from .subtyping import SubDerivation, check_sub_derivation
from .syntax import (
    Anno,
    App,
    Arrow,
    Bot,
    Fix,
    FixVar,
    Intersect,
    Lam,
    Let,
    LinVar,
    Linear,
    Slack,
    SlackLet,
    Union,
    Var,
    decompose_eval,
    is_value,
    linear_names,
    ok_delta,
    ok_gamma,
    plug,
    subst,
)

TRI_ONLY = {"directL"}
LET_ONLY = {"let", "slack-let", "slack-var"}


def validate(d: Derivation, system: str) -> list[str]:
    """All schema violations in ``d`` (empty when it replays) for system ``tri`` or ``let``."""
    errors: list[str] = []
    for node in d.nodes():
        errors.extend(f"[{node.rule}] {node.judgment}: {msg}" for msg in _node_errors(node, system))
    return errors


def replays(d: Derivation, system: str) -> bool:
    return not validate(d, system)


def _same_delta(a, b) -> bool:
    return Counter(a) == Counter(b)


def _node_errors(node: Derivation, system: str) -> list[str]:
    j = node.judgment
    g, delta, e, t = j.gamma, j.delta, j.subject, j.type
    kids = [c for c in node.children if isinstance(c, Derivation)]
    subs = [c for c in node.children if isinstance(c, SubDerivation)]
    errs: list[str] = []

    def need(cond, msg):
        if not cond:
            errs.append(msg)
        return cond

    def premise(i, mode, gamma, delta_, subject, ty) -> bool:
        if not need(i < len(kids), f"missing premise {i}"):
            return False
        k = kids[i].judgment
        ok = True
        ok &= need(k.mode == mode, f"premise {i} should be {mode}")
        ok &= need(k.gamma == gamma, f"premise {i} has the wrong ordinary context")
        if delta_ is not None:
            ok &= need(_same_delta(k.delta, delta_), f"premise {i} has linear context {k.delta}")
        ok &= need(k.subject == subject, f"premise {i} has subject {k.subject}")
        if ty is not None:
            ok &= need(k.type == ty, f"premise {i} has type {k.type}, expected {ty}")
        return ok

    def arity(n_kids, n_subs=0):
        need(len(kids) == n_kids, f"expected {n_kids} typing premises, got {len(kids)}")
        need(len(subs) == n_subs, f"expected {n_subs} subtyping premises, got {len(subs)}")

    rule = node.rule
    if system == "tri":
        need(rule not in LET_ONLY, "rule not in the tridirectional system")
        need(not any(isinstance(x, Slack) for x in delta), "slack entry in a tridirectional judgment")
    else:
        need(rule not in TRI_ONLY, "rule not in the let-normal system")
    need(ok_delta(delta, e), "linear context does not match the subject")
    need(ok_gamma(g, e), "subject mentions undeclared variables")
    checking = {"arrI", "fix", "sub", "botL", "andL1", "andL2", "andI", "orL", "orI1", "orI2",
                "directL", "let", "slack-let", "slack-var"}
    need(j.mode == (CHECK if rule in checking else SYNTH), f"wrong direction {j.mode}")

    match rule:
        case "var" | "fixvar":
            arity(0)
            kind = Var if rule == "var" else FixVar
            if need(isinstance(e, kind), "subject is not a variable of the right kind"):
                need(g.lookup(e.name) == t, "type differs from the context")
            need(not delta, "linear context must be empty")
        case "linvar":
            arity(0)
            if need(isinstance(e, LinVar), "subject is not a linear variable"):
                need(tuple(delta) == (Linear(e.name, t),), "linear context must be exactly the variable")
        case "arrI":
            arity(1)
            need(not delta, "linear context must be empty")
            if need(isinstance(e, Lam) and isinstance(t, Arrow), "needs a lambda against an arrow"):
                premise(0, CHECK, g.extend(e.var, t.dom), (), e.body, t.cod)
        case "fix":
            arity(1)
            need(not delta, "linear context must be empty")
            if need(isinstance(e, Fix), "subject is not fix"):
                premise(0, CHECK, g.extend(e.var, t), (), e.body, t)
        case "arrE":
            arity(2)
            if need(isinstance(e, App), "subject is not an application") and len(kids) == 2:
                fn_t = kids[0].judgment.type
                if need(isinstance(fn_t, Arrow) and fn_t.cod == t, "function type does not produce the result"):
                    premise(0, SYNTH, g, None, e.fn, fn_t)
                    premise(1, CHECK, g, None, e.arg, fn_t.dom)
                need(_same_delta(delta, kids[0].judgment.delta + kids[1].judgment.delta), "linear context split is wrong")
        case "sub":
            arity(1, 1)
            if kids and subs:
                a = kids[0].judgment.type
                premise(0, SYNTH, g, delta, e, a)
                need((subs[0].sub, subs[0].sup) == (a, t), "subtyping premise has the wrong types")
                errs.extend(check_sub_derivation(subs[0]))
        case "ctx-anno":
            i = node.info.get("index", -1)
            if need(isinstance(e, Anno) and 0 <= i < len(e.annotations), "no such annotation"):
                ann = e.annotations[i]
                need(ann.type == t, "annotation type differs")
                arity(1, len(ann.context))
                for (name, want), sd in zip(ann.context, subs):
                    have = g.lookup(name)
                    need(have is not None and (sd.sub, sd.sup) == (have, want), f"context entry {name} unsupported")
                    errs.extend(check_sub_derivation(sd))
                premise(0, CHECK, g, delta, e.subject, t)
        case "botL":
            arity(0)
            need(any(isinstance(x, Linear) and isinstance(x.type, Bot) for x in delta), "no bot assumption")
        case "andL1" | "andL2" | "orL":
            name = node.info.get("var")
            ent = next((x for x in delta if x.name == name and isinstance(x, Linear)), None)
            shape = Union if rule == "orL" else Intersect
            if need(ent is not None and isinstance(ent.type, shape), "no suitable assumption"):
                parts = [ent.type.left, ent.type.right]
                if rule != "orL":
                    parts = [parts[0] if rule == "andL1" else parts[1]]
                arity(len(parts))
                for k, part in enumerate(parts):
                    new = tuple(Linear(name, part) if x == ent else x for x in delta)
                    premise(k, CHECK, g, new, e, t)
        case "andI":
            arity(2)
            need(is_value(e), "value restriction")
            if need(isinstance(t, Intersect), "goal is not an intersection"):
                premise(0, CHECK, g, delta, e, t.left)
                premise(1, CHECK, g, delta, e, t.right)
        case "andE1" | "andE2":
            arity(1)
            if kids:
                big = kids[0].judgment.type
                part = None
                if isinstance(big, Intersect):
                    part = big.left if rule == "andE1" else big.right
                need(part == t, "premise is not a matching intersection")
                premise(0, SYNTH, g, delta, e, big)
        case "orI1" | "orI2":
            arity(1)
            if need(isinstance(t, Union), "goal is not a union"):
                premise(0, CHECK, g, delta, e, t.left if rule == "orI1" else t.right)
        case "directL":
            arity(2)
            ctx, name = node.info.get("context"), node.info.get("var")
            if len(kids) == 2 and ctx is not None:
                sub_e = kids[0].judgment.subject
                need(any(c == ctx and s == sub_e for c, s in decompose_eval(e)), "not an evaluation position")
                need(not isinstance(sub_e, LinVar), "names a linear variable")
                need(name not in {x.name for x in delta} and name not in linear_names(e), "name is not fresh")
                a = kids[0].judgment.type
                premise(0, SYNTH, g, None, sub_e, a)
                d1 = kids[0].judgment.delta
                rest = Counter(delta)
                rest.subtract(Counter(d1))
                need(all(v >= 0 for v in rest.values()), "premise uses assumptions it was not given")
                d2 = tuple((+rest).elements())
                premise(1, CHECK, g, d2 + (Linear(name, a),), plug(ctx, LinVar(name)), t)
        case "let" | "slack-let":
            shape = Let if rule == "let" else SlackLet
            if need(isinstance(e, shape), "subject has the wrong binding form"):
                arity(2 if rule == "let" else 1)
                body = kids[-1].judgment if kids else None
                if body is not None:
                    new = Counter(body.delta)
                    if rule == "let":
                        a = kids[0].judgment.type
                        premise(0, SYNTH, g, None, e.rhs, a)
                        new.update(Counter(kids[0].judgment.delta))
                    new.subtract(Counter(delta))
                    added = [x for x, c in new.items() if c > 0]
                    if need(all(c >= 0 for c in new.values()) and len(added) == 1, "body context is not the split plus the binding"):
                        x = added[0]
                        want = Linear(x.name, a) if rule == "let" else Slack(x.name, e.rhs)
                        need(x == want, f"bound assumption is {x}, expected {want}")
                        fresh = x.name == e.var or x.name not in linear_names(e)
                        if need(fresh, "renamed binder captures"):
                            premise(len(kids) - 1, CHECK, g, body.delta, subst(e.body, LinVar(e.var), LinVar(x.name)), t)
        case "slack-var":
            arity(2)
            name = node.info.get("var")
            ent = next((x for x in delta if x.name == name and isinstance(x, Slack)), None)
            if need(ent is not None, "no slack assumption") and len(kids) == 2:
                a = kids[0].judgment.type
                premise(0, SYNTH, g, None, ent.rhs, a)
                rest = Counter(x for x in delta if x != ent)
                rest.subtract(Counter(kids[0].judgment.delta))
                if need(all(v >= 0 for v in rest.values()), "premise uses assumptions it was not given"):
                    premise(1, CHECK, g, tuple((+rest).elements()) + (Linear(name, a),), e, t)
        case _:
            errs.append("unknown rule")
    return errs
