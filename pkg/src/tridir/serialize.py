"""JSON encodings of types, terms, bindings, measures, derivations and reports."""
from __future__ import annotations

from dataclasses import asdict

from .letnormal import Bind, Measure, SlackBind
from .parser import parse_type
from .search import CheckOutcome, Derivation, Judgment
from .subtyping import SubDerivation
from .syntax import (
    Anno,
    App,
    HOLE,
    ContextualAnnotation,
    Fix,
    FixVar,
    Hole,
    Lam,
    Let,
    LinVar,
    Linear,
    Slack,
    SlackLet,
    Term,
    Type,
    TypingContext,
    Var,
    show_term,
    show_type,
)


def type_to_json(t: Type) -> str:
    return show_type(t)


def type_from_json(s: str) -> Type:
    return parse_type(s)


def gamma_to_json(g: TypingContext) -> list:
    return [[n, type_to_json(t)] for n, t in g]


def gamma_from_json(data) -> TypingContext:
    return TypingContext(tuple((n, type_from_json(t)) for n, t in data))


def term_to_json(e: Term) -> dict:
    match e:
        case Hole():
            return {"tag": "hole"}
        case Var(n):
            return {"tag": "var", "name": n}
        case FixVar(n):
            return {"tag": "fixvar", "name": n}
        case LinVar(n):
            return {"tag": "linvar", "name": n}
        case Lam(x, b):
            return {"tag": "lam", "var": x, "body": term_to_json(b)}
        case Fix(u, b):
            return {"tag": "fix", "var": u, "body": term_to_json(b)}
        case App(f, a):
            return {"tag": "app", "fn": term_to_json(f), "arg": term_to_json(a)}
        case Anno(s, anns):
            return {"tag": "anno", "subject": term_to_json(s),
                    "annotations": [{"context": gamma_to_json(a.context), "type": type_to_json(a.type)} for a in anns]}
        case Let(x, r, b) | SlackLet(x, r, b):
            tag = "let" if isinstance(e, Let) else "slack-let"
            return {"tag": tag, "var": x, "rhs": term_to_json(r), "body": term_to_json(b)}
    raise TypeError(e)


def term_from_json(d: dict) -> Term:
    match d["tag"]:
        case "hole":
            return HOLE
        case "var":
            return Var(d["name"])
        case "fixvar":
            return FixVar(d["name"])
        case "linvar":
            return LinVar(d["name"])
        case "lam":
            return Lam(d["var"], term_from_json(d["body"]))
        case "fix":
            return Fix(d["var"], term_from_json(d["body"]))
        case "app":
            return App(term_from_json(d["fn"]), term_from_json(d["arg"]))
        case "anno":
            anns = tuple(ContextualAnnotation(gamma_from_json(a["context"]), type_from_json(a["type"]))
                         for a in d["annotations"])
            return Anno(term_from_json(d["subject"]), anns)
        case "let":
            return Let(d["var"], term_from_json(d["rhs"]), term_from_json(d["body"]))
        case "slack-let":
            return SlackLet(d["var"], term_from_json(d["rhs"]), term_from_json(d["body"]))
    raise ValueError(f"unknown term tag {d['tag']!r}")


def delta_to_json(delta) -> list:
    out = []
    for ent in delta:
        if isinstance(ent, Linear):
            out.append({"linear": ent.name, "type": type_to_json(ent.type)})
        else:
            out.append({"slack": ent.name, "rhs": term_to_json(ent.rhs)})
    return out


def delta_from_json(data) -> tuple:
    return tuple(Linear(d["linear"], type_from_json(d["type"])) if "linear" in d
                 else Slack(d["slack"], term_from_json(d["rhs"])) for d in data)


def bindings_to_json(bindings) -> list:
    return [{"kind": "slack" if isinstance(b, SlackBind) else "let", "var": b.var, "rhs": term_to_json(b.rhs)}
            for b in bindings]


def bindings_from_json(data) -> tuple:
    return tuple((SlackBind if d["kind"] == "slack" else Bind)(d["var"], term_from_json(d["rhs"])) for d in data)


def measure_to_json(m: Measure) -> dict:
    return asdict(m)


def sub_derivation_to_json(d: SubDerivation) -> dict:
    return {"rule": d.rule, "sub": type_to_json(d.sub), "sup": type_to_json(d.sup),
            "children": [sub_derivation_to_json(c) for c in d.children]}


def sub_derivation_from_json(d: dict) -> SubDerivation:
    return SubDerivation(d["rule"], type_from_json(d["sub"]), type_from_json(d["sup"]),
                         tuple(sub_derivation_from_json(c) for c in d["children"]))


def derivation_to_json(d: Derivation) -> dict:
    j = d.judgment
    info = {}
    for k, v in d.info.items():
        info[k] = term_to_json(v) if isinstance(v, Term) else v
    children = [derivation_to_json(c) if isinstance(c, Derivation) else {"subtyping": sub_derivation_to_json(c)}
                for c in d.children]
    return {
        "rule": d.rule,
        "judgment": {
            "gamma": gamma_to_json(j.gamma),
            "delta": delta_to_json(j.delta),
            "term": show_term(j.subject),
            "subject": term_to_json(j.subject),
            "direction": j.mode,
            "type": type_to_json(j.type),
        },
        "info": info,
        "children": children,
    }


def derivation_from_json(d: dict) -> Derivation:
    j = d["judgment"]
    judgment = Judgment(gamma_from_json(j["gamma"]), delta_from_json(j["delta"]), term_from_json(j["subject"]),
                        j["direction"], type_from_json(j["type"]))
    info = {k: term_from_json(v) if isinstance(v, dict) else v for k, v in d.get("info", {}).items()}
    children = tuple(sub_derivation_from_json(c["subtyping"]) if "subtyping" in c else derivation_from_json(c)
                     for c in d["children"])
    return Derivation(d["rule"], judgment, children, info)


def outcome_to_json(o: CheckOutcome) -> dict:
    out = {"verdict": o.verdict.value, "steps": o.steps}
    if o.derivation is not None:
        out["derivation"] = derivation_to_json(o.derivation)
    return out


def report_to_json(report) -> dict:
    def case(rec):
        return {"term": show_term(rec.term), "type": type_to_json(rec.type),
                "tri": outcome_to_json(rec.tri), "let": outcome_to_json(rec.ln)}

    return {
        "terms": report.terms,
        "cases": report.cases,
        "outcomes": [{"tri": a, "let": b, "count": n} for (a, b), n in sorted(report.outcomes.items())],
        "disagreements": [case(r) for r in report.disagreements],
        "fuel_exhausted": [case(r) for r in report.fuel_exhausted],
    }
