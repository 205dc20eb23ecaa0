"""
Let-normal form: translation from source terms, unwinding back, well-formedness,
and the measure of distance from the canonical translation.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import astuple, dataclass

from .syntax import (
    Anno,
    App,
    Fix,
    FixVar,
    Kind,
    Lam,
    Let,
    LinVar,
    SlackLet,
    Term,
    Var,
    classify,
    in_elongated_position,
    is_value,
    linear_names,
    show_term,
    subst,
)


class UnboundLinear(ValueError):
    pass


@dataclass(frozen=True)
class Bind:
    var: str
    rhs: Term

    def __str__(self):
        return f"{self.var}^ = {show_term(self.rhs)}"


@dataclass(frozen=True)
class SlackBind:
    var: str
    rhs: Term

    def __str__(self):
        return f"{self.var}^ ! {show_term(self.rhs)}"


def show_bindings(bindings, body: Term) -> str:
    return f"{', '.join(map(str, bindings)) or '.'} + {show_term(body)}"


# ---------------------------------------------------------------------------
# Translation


class _Namer:
    def __init__(self, avoid: set[str]):
        self._avoid = avoid
        self._counter = itertools.count()

    def fresh(self) -> str:
        while True:
            name = f"x{next(self._counter)}"
            if name not in self._avoid:
                return name


def translate(e: Term) -> tuple[tuple, Term]:
    """``e`` becomes bindings ``L`` plus a body; names are ``x0, x1, ...`` in post-order."""
    return _translate(e, _Namer(linear_names(e)))


def _translate(e: Term, names: _Namer) -> tuple[tuple, Term]:
    match e:
        case Var() | FixVar():
            x = names.fresh()
            return (Bind(x, e),), LinVar(x)
        case LinVar():
            return (), e
        case Lam(x, body) | Fix(x, body):
            return (), type(e)(x, embed(*_translate(body, names)))
        case App(f, a):
            l1, f2 = _translate(f, names)
            l2, a2 = _translate(a, names)
            if classify(f) is Kind.ANTI_VALUE:
                # the argument is not in evaluation position: keep its bindings inside it
                x = names.fresh()
                return l1 + (Bind(x, App(f2, embed(l2, a2))),), LinVar(x)
            x = names.fresh()
            return l1 + l2 + (Bind(x, App(f2, a2)),), LinVar(x)
        case Anno(s, anns):
            l1, s2 = _translate(s, names)
            x = names.fresh()
            kind = SlackBind if is_value(s) else Bind
            return l1 + (kind(x, Anno(s2, anns)),), LinVar(x)
    raise TypeError(f"cannot translate {e!r}")


def embed(bindings, body: Term) -> Term:
    for b in reversed(tuple(bindings)):
        body = (SlackLet if isinstance(b, SlackBind) else Let)(b.var, b.rhs, body)
    return body


def let_normal(e: Term) -> Term:
    """The embedded canonical translation of ``e``."""
    return embed(*translate(e))


def split_bindings(e: Term) -> tuple[tuple, Term]:
    """The maximal decomposition of ``e`` into bindings and a non-let body."""
    out = []
    while isinstance(e, (Let, SlackLet)):
        out.append((SlackBind if isinstance(e, SlackLet) else Bind)(e.var, e.rhs))
        e = e.body
    return tuple(out), e


# ---------------------------------------------------------------------------
# Unwinding


def unwind(e: Term, free: frozenset[str] = frozenset()) -> Term:
    """Substitute every binding's right-hand side for its variable; ``free`` linear names may stay."""
    return _unwind(e, frozenset(free))


def _unwind(e: Term, bound: frozenset[str]) -> Term:
    match e:
        case LinVar(n):
            if n not in bound:
                raise UnboundLinear(f"linear variable {n}^ escapes its binding")
            return e
        case Lam(x, b) | Fix(x, b):
            return type(e)(x, _unwind(b, bound))
        case App(f, a):
            return App(_unwind(f, bound), _unwind(a, bound))
        case Anno(s, anns):
            return Anno(_unwind(s, bound), anns)
        case Let(x, r, b) | SlackLet(x, r, b):
            rhs = _unwind(r, bound)
            body = _unwind(b, bound | {x})
            return subst(body, LinVar(x), rhs)
    return e


# ---------------------------------------------------------------------------
# Well-formedness


def wf_letnormal(e: Term) -> bool:
    counts = Counter(e.free_linear)
    if any(c > 1 for c in counts.values()):
        return False
    return _wf(e)


def _wf(e: Term) -> bool:
    match e:
        case Lam(_, b) | Fix(_, b):
            return _wf(b)
        case App(f, a):
            return _wf(f) and _wf(a)
        case Anno(s, _):
            return _wf(s)
        case Let(x, r, b) | SlackLet(x, r, b):
            if x in r.free_linear or b.free_linear.count(x) != 1:
                return False
            if isinstance(e, SlackLet) and not (isinstance(r, Anno) and is_value(r.subject)):
                return False
            return in_elongated_position(b, x) and _wf(r) and _wf(b)
    return True


# ---------------------------------------------------------------------------
# Measure


@dataclass(frozen=True, order=True)
class Measure:
    unbound_synth: int
    brittle: int
    prickly: int
    transposed: int

    def __str__(self):
        return " ".join(map(str, astuple(self)))

    @property
    def is_zero(self) -> bool:
        return astuple(self) == (0, 0, 0, 0)


def measure(e: Term) -> Measure:
    return Measure(_unbound_synth(e, False), _brittle(e, {}), _prickly(e, True), _transposed(e))


def _children(e: Term) -> tuple[Term, ...]:
    match e:
        case Lam(_, b) | Fix(_, b):
            return (b,)
        case App(f, a):
            return (f, a)
        case Anno(s, _):
            return (s,)
        case Let(_, r, b) | SlackLet(_, r, b):
            return (r, b)
    return ()


def _unbound_synth(e: Term, bound: bool) -> int:
    here = int(isinstance(e, (Var, FixVar, App, Anno)) and not bound)
    if isinstance(e, (Let, SlackLet)):
        return here + _unbound_synth(e.rhs, True) + _unbound_synth(e.body, False)
    return here + sum(_unbound_synth(c, False) for c in _children(e))


def _unwinds_to_value(e: Term, env: dict[str, bool]) -> bool:
    match e:
        case LinVar(n):
            return env.get(n, True)
        case Var() | Lam():
            return True
        case Anno(s, _):
            return _unwinds_to_value(s, env)
        case Let(x, r, b) | SlackLet(x, r, b):
            return _unwinds_to_value(b, {**env, x: _unwinds_to_value(r, env)})
    return False


def _brittle(e: Term, env: dict[str, bool]) -> int:
    # an ordinary binding of an annotated value should have been a slack binding
    match e:
        case Let(x, r, b) | SlackLet(x, r, b):
            here = int(isinstance(e, Let) and isinstance(r, Anno) and _unwinds_to_value(r.subject, env))
            inner = {**env, x: _unwinds_to_value(r, env)}
            return here + _brittle(r, env) + _brittle(b, inner)
    return sum(_brittle(c, env) for c in _children(e))


def _prickly(e: Term, at_root: bool) -> int:
    # bindings belong at a root: the whole term, a lambda/fix body, or the
    # argument of an anti-value (whose bindings cannot move past the function)
    match e:
        case Let(_, r, b) | SlackLet(_, r, b):
            return int(not at_root) + _prickly(r, False) + _prickly(b, at_root)
        case Lam(_, b) | Fix(_, b):
            return _prickly(b, True)
        case App(f, a):
            return _prickly(f, False) + _prickly(a, classify(f) is Kind.ANTI_VALUE)
        case Anno(s, _):
            return _prickly(s, False)
    return 0


def _transposed(e: Term) -> int:
    # positions: the post-order index each bound variable's right-hand side
    # would have in the unwound term
    positions: dict[tuple, int] = {}
    counter = itertools.count()

    def visit(t: Term, path: tuple, env: dict):
        match t:
            case LinVar(n) if n in env:
                let_path, rhs, rhs_env = env[n]
                if let_path not in positions:
                    visit(rhs, let_path + ("r",), rhs_env)
                    positions[let_path] = next(counter)
                return
            case Let(x, r, b) | SlackLet(x, r, b):
                visit(b, path + ("b",), {**env, x: (path, r, env)})
                return
            case Lam(_, b) | Fix(_, b):
                visit(b, path + ("b",), env)
            case App(f, a):
                visit(f, path + ("f",), env)
                visit(a, path + ("a",), env)
            case Anno(s, _):
                visit(s, path + ("s",), env)
        next(counter)

    visit(e, (), {})

    total = 0

    def chains(t: Term, path: tuple, starts: bool):
        nonlocal total
        if isinstance(t, (Let, SlackLet)):
            if starts:
                seq = []
                cur, p = t, path
                while isinstance(cur, (Let, SlackLet)):
                    seq.append(p)
                    chains(cur.rhs, p + ("r",), True)
                    cur, p = cur.body, p + ("b",)
                chains(cur, p, True)
                pos = [positions[s] for s in seq if s in positions]
                total += sum(1 for i, j in itertools.combinations(range(len(pos)), 2) if pos[i] > pos[j])
            return
        match t:
            case Lam(_, b) | Fix(_, b):
                chains(b, path + ("b",), True)
            case App(f, a):
                chains(f, path + ("f",), True)
                chains(a, path + ("a",), True)
            case Anno(s, _):
                chains(s, path + ("s",), True)

    chains(e, (), True)
    return total
