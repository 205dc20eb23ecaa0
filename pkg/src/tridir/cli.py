"""Command-line front end.  Exit codes: 0 accept/agree, 1 reject/disagree, 2 fuel exhausted, 3 usage or input error."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .differential import Signature, enumerate_terms, random_terms, run_differential
from .evaluator import evaluate
from .letnormal import UnboundLinear, embed, let_normal, measure, translate, unwind
from .lncheck import LetNormalChecker
from .parser import ParseError, parse, parse_type
from .search import DEFAULT_FUEL, IllFormed, IllScoped, Verdict
from .serialize import (
    bindings_to_json,
    derivation_to_json,
    measure_to_json,
    outcome_to_json,
    report_to_json,
    term_from_json,
    term_to_json,
    type_to_json,
)
from .syntax import show_term
from .tri import TriChecker

EXIT = {Verdict.ACCEPT: 0, Verdict.REJECT: 1, Verdict.FUEL_EXHAUSTED: 2}


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(3)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _load_let_term(path: str):
    """A let-normal term: the translation of a source file, or a JSON-encoded term."""
    text = _read(path)
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
            return term_from_json(data.get("term", data))
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"{path}: not a JSON term: {exc}") from exc
    return let_normal(parse(text).term)


def _checker(args, gamma):
    cls = TriChecker if args.system == "tri" else LetNormalChecker
    return cls(gamma, fuel=args.fuel, strategy=args.strategy)


def cmd_check(args) -> int:
    src = parse(_read(args.file))
    goal = parse_type(args.against, src.atoms or None)
    subject = src.term if args.system == "tri" else let_normal(src.term)
    outcome = _checker(args, src.gamma).check(subject, goal)
    if args.json:
        data = outcome_to_json(outcome)
        if not args.derivation:
            data.pop("derivation", None)
        print(json.dumps(data, indent=2))
    else:
        print(f"{outcome.verdict.value} ({outcome.steps} steps)")
        if args.derivation and outcome.derivation is not None:
            print(outcome.derivation.pretty())
    return EXIT[outcome.verdict]


def cmd_synth(args) -> int:
    src = parse(_read(args.file))
    subject = src.term if args.system == "tri" else let_normal(src.term)
    outcome = _checker(args, src.gamma).synth(subject)
    if args.json:
        results = []
        for t, d in outcome.results:
            item = {"type": type_to_json(t)}
            if args.derivation:
                item["derivation"] = derivation_to_json(d)
            results.append(item)
        print(json.dumps({"verdict": outcome.verdict.value, "steps": outcome.steps, "types": results}, indent=2))
    else:
        if outcome.verdict is Verdict.FUEL_EXHAUSTED:
            print(f"fuel-exhausted ({outcome.steps} steps)")
        for t, d in outcome.results:
            print(t)
            if args.derivation:
                print(d.pretty())
    return EXIT[outcome.verdict]


def cmd_translate(args) -> int:
    src = parse(_read(args.file))
    bindings, body = translate(src.term)
    if args.json:
        data = {"bindings": bindings_to_json(bindings), "body": term_to_json(body),
                "term": term_to_json(embed(bindings, body))}
        print(json.dumps(data, indent=2))
    else:
        for b in bindings:
            print(b)
        print(f"+ {show_term(body)}")
    return 0


def cmd_measure(args) -> int:
    m = measure(_load_let_term(args.file))
    print(json.dumps(measure_to_json(m)) if args.json else m)
    return 0


def cmd_unwind(args) -> int:
    e = unwind(_load_let_term(args.file))
    print(json.dumps(term_to_json(e), indent=2) if args.json else show_term(e))
    return 0


def cmd_eval(args) -> int:
    result = evaluate(parse(_read(args.file)).term, args.max_steps)
    print(result)
    return {"value": 0, "stuck": 1, "out-of-steps": 2}[result.status]


def cmd_differ(args) -> int:
    sig = Signature(max_size=args.size, seed=args.seed)
    report = run_differential(enumerate_terms(sig, annotate=args.annotate), sig.check_types,
                              sig.gamma, args.fuel, args.strategy)
    if args.random:
        rsig = replace(sig, max_size=args.random_size, density=args.density)
        report.merge(run_differential(random_terms(rsig, args.random), sig.check_types,
                                      sig.gamma, args.fuel, args.strategy))
    print(json.dumps(report_to_json(report), indent=2) if args.json else report.table())
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = _ArgumentParser(prog="tridir", description="Typecheck with intersections, unions and bot.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def search_flags(q):
        q.add_argument("--system", choices=["let", "tri"], default="let")
        q.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
        q.add_argument("--strategy", choices=["heuristic", "exhaustive"], default="heuristic")
        q.add_argument("--json", action="store_true")
        q.add_argument("--derivation", action="store_true")

    q = sub.add_parser("check", help="check a term against a type")
    q.add_argument("file")
    q.add_argument("--against", required=True, metavar="TYPE")
    search_flags(q)
    q.set_defaults(run=cmd_check)

    q = sub.add_parser("synth", help="list the types a term synthesizes")
    q.add_argument("file")
    search_flags(q)
    q.set_defaults(run=cmd_synth)

    q = sub.add_parser("translate", help="print the let-normal translation")
    q.add_argument("file")
    q.add_argument("--json", action="store_true")
    q.set_defaults(run=cmd_translate)

    for name, fn, text in (("measure", cmd_measure, "distance from the canonical translation"),
                           ("unwind", cmd_unwind, "substitute let-bindings away")):
        q = sub.add_parser(name, help=text)
        q.add_argument("file", help="source file (translated first) or JSON let-normal term")
        q.add_argument("--json", action="store_true")
        q.set_defaults(run=fn)

    q = sub.add_parser("eval", help="evaluate a closed term")
    q.add_argument("file")
    q.add_argument("--max-steps", type=int, default=1000)
    q.set_defaults(run=cmd_eval)

    q = sub.add_parser("differ", help="compare the two systems on generated terms")
    q.add_argument("--size", type=int, default=5)
    q.add_argument("--annotate", action="store_true", help="include annotations in the exhaustive corpus")
    q.add_argument("--random", type=int, default=0, metavar="K")
    q.add_argument("--random-size", type=int, default=12)
    q.add_argument("--density", type=float, default=0.5)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    q.add_argument("--strategy", choices=["heuristic", "exhaustive"], default="heuristic")
    q.add_argument("--json", action="store_true")
    q.set_defaults(run=cmd_differ)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except (UsageError, ParseError, IllScoped, IllFormed, UnboundLinear) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
