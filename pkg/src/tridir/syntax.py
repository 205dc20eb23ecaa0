"""
Types, source terms, let-normal terms and the syntactic operations over them.

A single term AST covers both the source language and the let-normal
language: source terms simply never contain ``LinVar``, ``Let`` or
``SlackLet`` nodes.  ``Hole`` only ever appears inside evaluation contexts.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator


class _Node:
    """Mixin giving frozen dataclasses a cached structural hash."""

    def __post_init__(self):
        object.__setattr__(self, "_h", hash((type(self).__name__,) + self._key()))

    def _key(self) -> tuple:
        raise NotImplementedError

    def __hash__(self):
        return self._h


def _node(cls):
    cls = dataclass(frozen=True, eq=True, repr=False)(cls)
    cls.__hash__ = _Node.__hash__
    return cls


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True, eq=True, repr=False)
class Type(_Node):
    def __repr__(self):
        return f"<{self}>"

    def __str__(self):
        return show_type(self)

    @cached_property
    def size(self) -> int:
        return 1 + sum(c.size for c in self._key() if isinstance(c, Type))


@_node
class Base(Type):
    name: str
    _h: int = field(init=False, compare=False, default=0)

    def _key(self):
        return (self.name,)


@_node
class Bot(Type):
    _h: int = field(init=False, compare=False, default=0)

    def _key(self):
        return ()


@_node
class Arrow(Type):
    dom: Type
    cod: Type
    _h: int = field(init=False, compare=False, default=0)

    def _key(self):
        return (self.dom, self.cod)


@_node
class Intersect(Type):
    left: Type
    right: Type
    _h: int = field(init=False, compare=False, default=0)

    def _key(self):
        return (self.left, self.right)


@_node
class Union(Type):
    left: Type
    right: Type
    _h: int = field(init=False, compare=False, default=0)

    def _key(self):
        return (self.left, self.right)


BOT = Bot()



def show_type(t: Type, prec: int = 0) -> str:
    match t:
        case Base(name):
            return name
        case Bot():
            return "bot"
        case Arrow(a, b):
            s = f"{show_type(a, 2)} -> {show_type(b, 1)}"
            p = 1
        case Union(a, b):
            s = f"{show_type(a, 2)} \\/ {show_type(b, 3)}"
            p = 2
        case Intersect(a, b):
            s = f"{show_type(a, 3)} /\\ {show_type(b, 4)}"
            p = 3
        case _:
            raise TypeError(t)
    return f"({s})" if p < prec else s


def projections(t: Type) -> Iterator[Type]:
    """``t`` followed by everything reachable from it by /\\-projection, depth first."""
    yield t
    if isinstance(t, Intersect):
        yield from projections(t.left)
        yield from projections(t.right)


def exposes_left_rule(t: Type) -> bool:
    """True when a union or bot sits somewhere on the /\\-spine of ``t``."""
    match t:
        case Bot() | Union():
            return True
        case Intersect(a, b):
            return exposes_left_rule(a) or exposes_left_rule(b)
    return False


def atoms_of(t: Type) -> set[str]:
    match t:
        case Base(name):
            return {name}
        case Bot():
            return set()
        case Arrow(a, b) | Intersect(a, b) | Union(a, b):
            return atoms_of(a) | atoms_of(b)
    raise TypeError(t)


def enumerate_types(atoms: Iterable[str], depth: int, bot: bool = True) -> list[Type]:
    """All types of depth <= ``depth`` (atoms and bot have depth 1), in a fixed order."""
    everything: list[Type] = [Base(a) for a in atoms] + ([BOT] if bot else [])
    for _ in range(depth - 1):
        prev = list(everything)
        seen = set(prev)
        for ctor in (Arrow, Intersect, Union):
            for a in prev:
                for b in prev:
                    t = ctor(a, b)
                    if t not in seen:
                        seen.add(t)
                        everything.append(t)
    return everything


# ---------------------------------------------------------------------------
# Contexts


@dataclass(frozen=True)
class TypingContext:
    """Ordinary assumptions ``x:A`` and ``u:A``; later entries shadow earlier ones."""

    entries: tuple[tuple[str, Type], ...] = ()

    def __post_init__(self):
        names = [n for n, _ in self.entries]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate variable in context: {names}")

    @classmethod
    def of(cls, mapping: dict[str, Type] | Iterable[tuple[str, Type]] = ()) -> TypingContext:
        items = mapping.items() if isinstance(mapping, dict) else mapping
        return cls(tuple(items))

    @cached_property
    def _map(self) -> dict[str, Type]:
        return dict(self.entries)

    def lookup(self, name: str) -> Type | None:
        return self._map.get(name)

    def __contains__(self, name) -> bool:
        return name in self._map

    def extend(self, name: str, ty: Type) -> TypingContext:
        rest = tuple((n, t) for n, t in self.entries if n != name)
        return TypingContext(rest + ((name, ty),))

    def names(self) -> list[str]:
        return [n for n, _ in self.entries]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @cached_property
    def _hash(self) -> int:
        return hash(self.entries)

    def __hash__(self):
        return self._hash

    def __str__(self):
        return ", ".join(f"{n}:{t}" for n, t in self.entries) or "."


EMPTY = TypingContext()


@dataclass(frozen=True)
class ContextualAnnotation:
    context: TypingContext
    type: Type

    def __post_init__(self):
        if not isinstance(self.context, TypingContext):
            object.__setattr__(self, "context", TypingContext.of(self.context))

    def __str__(self):
        if len(self.context):
            return f"{self.context} |- {self.type}"
        return f"|- {self.type}"


@dataclass(frozen=True)
class Linear:
    name: str
    type: Type

    def __str__(self):
        return f"{self.name}^:{self.type}"


@dataclass(frozen=True)
class Slack:
    name: str
    rhs: Term

    def __str__(self):
        return f"{self.name}^ ! {self.rhs}"


LinearEntry = Linear | Slack
LinearContext = tuple  # of LinearEntry


def show_delta(delta: LinearContext) -> str:
    return ", ".join(map(str, delta)) or "."


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True, eq=True, repr=False)
class Term(_Node):
    def __repr__(self):
        return f"<{self}>"

    def __str__(self):
        return show_term(self)

    @cached_property
    def free_linear(self) -> tuple[str, ...]:
        """Free linear variables, left to right, with multiplicity."""
        return tuple(_free_linear(self))

    @cached_property
    def size(self) -> int:
        match self:
            case Lam(_, b) | Fix(_, b):
                return 1 + b.size
            case App(f, a):
                return 1 + f.size + a.size
            case Anno(s, _):
                return 1 + s.size
            case Let(_, r, b) | SlackLet(_, r, b):
                return 1 + r.size + b.size
        return 1


@_node
class Var(Term):
    name: str
    _h: int = field(init=False, compare=False, default=0)

    def _key(self):
        return (self.name,)


@_node
class FixVar(Term):
    name: str
    _h: int = field(init=False, compare=False, default=0)

    def _key(self):
        return (self.name,)


@_node
class LinVar(Term):
    name: str
    _h: int = field(init=False, compare=False, default=0)

    def _key(self):
        return (self.name,)


@_node
class Lam(Term):
    var: str
    body: Term
    _h: int = field(init=False, compare=False, default=0)

    def _key(self):
        return (self.var, self.body)


@_node
class Fix(Term):
    var: str
    body: Term
    _h: int = field(init=False, compare=False, default=0)

    def _key(self):
        return (self.var, self.body)


@_node
class App(Term):
    fn: Term
    arg: Term
    _h: int = field(init=False, compare=False, default=0)

    def _key(self):
        return (self.fn, self.arg)


@_node
class Anno(Term):
    subject: Term
    annotations: tuple[ContextualAnnotation, ...]
    _h: int = field(init=False, compare=False, default=0)

    def __post_init__(self):
        object.__setattr__(self, "annotations", tuple(self.annotations))
        super().__post_init__()

    def _key(self):
        return (self.subject, self.annotations)


@_node
class Let(Term):
    var: str
    rhs: Term
    body: Term
    _h: int = field(init=False, compare=False, default=0)

    def _key(self):
        return (self.var, self.rhs, self.body)


@_node
class SlackLet(Term):
    var: str
    rhs: Term
    body: Term
    _h: int = field(init=False, compare=False, default=0)

    def _key(self):
        return (self.var, self.rhs, self.body)


@_node
class Hole(Term):
    _h: int = field(init=False, compare=False, default=0)

    def _key(self):
        return ()


HOLE = Hole()


def app(*terms: Term) -> Term:
    """Left-nested application ``t0 t1 ... tn``."""
    return _functools_reduce(App, terms)


def _functools_reduce(f, xs):
    it = iter(xs)
    acc = next(it)
    for x in it:
        acc = f(acc, x)
    return acc


def _free_linear(e: Term) -> Iterator[str]:
    match e:
        case LinVar(n):
            yield n
        case Lam(_, b) | Fix(_, b):
            yield from b.free_linear
        case App(f, a):
            yield from f.free_linear
            yield from a.free_linear
        case Anno(s, _):
            yield from s.free_linear
        case Let(x, r, b) | SlackLet(x, r, b):
            yield from r.free_linear
            yield from (n for n in b.free_linear if n != x)


def show_term(e: Term, prec: int = 0) -> str:
    # prec 0: anything; 1: function position; 2: argument position
    match e:
        case Var(n) | FixVar(n):
            return n
        case LinVar(n):
            return f"{n}^"
        case Hole():
            return "[]"
        case Lam(x, b):
            s, p = f"fn {x} => {show_term(b)}", 0
        case Fix(u, b):
            s, p = f"fix {u} => {show_term(b)}", 0
        case App(f, a):
            s, p = f"{show_term(f, 1)} {show_term(a, 2)}", 1
        case Anno(subj, anns):
            return f"({show_term(subj)} : {', '.join(map(str, anns))})"
        case Let(x, r, b):
            s, p = f"let {x}^ = {show_term(r)} in {show_term(b)}", 0
        case SlackLet(x, r, b):
            s, p = f"let! {x}^ = {show_term(r)} in {show_term(b)}", 0
        case _:
            raise TypeError(e)
    return f"({s})" if p < prec else s


# ---------------------------------------------------------------------------
# Variables, scoping, linearity


def free_vars(e: Term) -> set[str]:
    """Free ordinary and fix variables."""
    match e:
        case Var(n) | FixVar(n):
            return {n}
        case Lam(x, b) | Fix(x, b):
            return free_vars(b) - {x}
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case Anno(s, _):
            return free_vars(s)
        case Let(_, r, b) | SlackLet(_, r, b):
            return free_vars(r) | free_vars(b)
    return set()


def linear_names(e: Term) -> set[str]:
    """Every linear variable name mentioned in ``e``, free or bound."""
    match e:
        case LinVar(n):
            return {n}
        case Lam(_, b) | Fix(_, b):
            return linear_names(b)
        case App(f, a):
            return linear_names(f) | linear_names(a)
        case Anno(s, _):
            return linear_names(s)
        case Let(x, r, b) | SlackLet(x, r, b):
            return {x} | linear_names(r) | linear_names(b)
    return set()


def ok_gamma(gamma: TypingContext, e: Term) -> bool:
    return all(n in gamma for n in free_vars(e))


def footprint(delta: LinearContext, names: Iterable[str]) -> set[str]:
    """Close ``names`` under 'mentioned by the right-hand side of a slack entry'."""
    slack = {ent.name: ent.rhs for ent in delta if isinstance(ent, Slack)}
    todo = list(names)
    seen: set[str] = set()
    while todo:
        n = todo.pop()
        if n in seen:
            continue
        seen.add(n)
        if n in slack:
            todo.extend(slack[n].free_linear)
    return seen


def linear_occurrences(delta: LinearContext, e: Term) -> list[str]:
    """Occurrences of linear variables in ``e`` and in the slack right-hand sides of ``delta``."""
    occ = list(e.free_linear)
    for ent in delta:
        if isinstance(ent, Slack):
            occ.extend(ent.rhs.free_linear)
    return occ


def ok_delta(delta: LinearContext, e: Term) -> bool:
    """Each variable of ``delta`` occurs exactly once, and no other linear variable occurs."""
    names = [ent.name for ent in delta]
    if len(names) != len(set(names)):
        return False
    occ = linear_occurrences(delta, e)
    return sorted(occ) == sorted(names)


def split_delta(delta: LinearContext, part: Term) -> tuple[LinearContext, LinearContext]:
    """Entries used by ``part`` (through slack right-hand sides too), and the rest."""
    used = footprint(delta, part.free_linear)
    mine = tuple(ent for ent in delta if ent.name in used)
    rest = tuple(ent for ent in delta if ent.name not in used)
    return mine, rest


def fresh_name(base: str, avoid: set[str]) -> str:
    if base not in avoid:
        return base
    for i in itertools.count(1):
        cand = f"{base}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError


# ---------------------------------------------------------------------------
# Substitution


def subst(e: Term, target: Term, value: Term) -> Term:
    """Capture-avoiding ``[value/target]e``; ``target`` is a Var, FixVar or LinVar."""
    fv = free_vars(value)
    lin_fv = set(value.free_linear)
    return _subst(e, target, value, fv, lin_fv)


def _subst(e, target, value, fv, lin_fv):
    if e == target:
        return value
    match e:
        case Lam(x, b) | Fix(x, b):
            if isinstance(target, (Var, FixVar)) and x == target.name:
                return e
            if x in fv and _occurs_free(b, target):
                new = fresh_name(x, fv | free_vars(b) | {target.name})
                kind = Var if isinstance(e, Lam) else FixVar
                b = _rename_ordinary(b, x, new, kind)
                x = new
            return type(e)(x, _subst(b, target, value, fv, lin_fv))
        case App(f, a):
            return App(_subst(f, target, value, fv, lin_fv), _subst(a, target, value, fv, lin_fv))
        case Anno(s, anns):
            return Anno(_subst(s, target, value, fv, lin_fv), anns)
        case Let(x, r, b) | SlackLet(x, r, b):
            r2 = _subst(r, target, value, fv, lin_fv)
            if isinstance(target, LinVar) and x == target.name:
                return type(e)(x, r2, b)
            if x in lin_fv and _occurs_free(b, target):
                new = fresh_name(x, lin_fv | linear_names(b))
                b = subst(b, LinVar(x), LinVar(new))
                x = new
            return type(e)(x, r2, _subst(b, target, value, fv, lin_fv))
    return e


def _occurs_free(e: Term, target: Term) -> bool:
    if isinstance(target, LinVar):
        return target.name in e.free_linear
    return target.name in free_vars(e)


def _rename_ordinary(e: Term, old: str, new: str, kind) -> Term:
    # bound-variable renaming: both Var and FixVar occurrences share the binder's name space
    match e:
        case Var(n) | FixVar(n) if n == old:
            return type(e)(new)
        case Lam(x, b) | Fix(x, b):
            if x == old:
                return e
            return type(e)(x, _rename_ordinary(b, old, new, kind))
        case App(f, a):
            return App(_rename_ordinary(f, old, new, kind), _rename_ordinary(a, old, new, kind))
        case Anno(s, anns):
            return Anno(_rename_ordinary(s, old, new, kind), anns)
        case Let(x, r, b) | SlackLet(x, r, b):
            return type(e)(x, _rename_ordinary(r, old, new, kind), _rename_ordinary(b, old, new, kind))
    return e


def subst_value(v: Term, x: Term, e: Term) -> Term:
    """``[v/x]e`` for a syntactic value ``v``."""
    if not is_value(v):
        raise ValueError(f"not a value: {v}")
    return subst(e, x, v)


def rename_linear(e: Term, mapping: dict[str, str]) -> Term:
    """Rename free linear variables according to ``mapping``."""
    if not mapping or not e.free_linear:
        return e
    match e:
        case LinVar(n):
            return LinVar(mapping.get(n, n))
        case Lam(x, b) | Fix(x, b):
            return type(e)(x, rename_linear(b, mapping))
        case App(f, a):
            return App(rename_linear(f, mapping), rename_linear(a, mapping))
        case Anno(s, anns):
            return Anno(rename_linear(s, mapping), anns)
        case Let(x, r, b) | SlackLet(x, r, b):
            inner = {k: v for k, v in mapping.items() if k != x}
            if x in inner.values():
                raise ValueError(f"renaming would capture bound linear variable {x}")
            return type(e)(x, rename_linear(r, mapping), rename_linear(b, inner))
    return e


# ---------------------------------------------------------------------------
# Classification


class Kind(enum.Enum):
    PRE_VALUE = "pre-value"
    ANTI_VALUE = "anti-value"


def classify(e: Term) -> Kind:
    match e:
        case Fix():
            return Kind.ANTI_VALUE
        case Let(x, r, b) | SlackLet(x, r, b):
            # a let-term behaves like the term it unwinds to
            return classify(r) if b == LinVar(x) else classify(b)
    return Kind.PRE_VALUE


def is_value(e: Term) -> bool:
    """Values: x, x^, fn x => e, (v : As), and lets of values in values."""
    match e:
        case Var() | LinVar() | Lam():
            return True
        case Anno(s, _):
            return is_value(s)
        case Let(_, r, b) | SlackLet(_, r, b):
            return is_value(r) and is_value(b)
    return False


def synthesizing_form(e: Term) -> bool:
    return isinstance(e, (Var, FixVar, LinVar, App, Anno))


# ---------------------------------------------------------------------------
# Evaluation contexts


def plug(ctx: Term, e: Term) -> Term:
    match ctx:
        case Hole():
            return e
        case App(f, a):
            if contains_hole(f):
                return App(plug(f, e), a)
            return App(f, plug(a, e))
        case Anno(s, anns):
            return Anno(plug(s, e), anns)
        case Let(x, r, b) | SlackLet(x, r, b):
            if contains_hole(r):
                return type(ctx)(x, plug(r, e), b)
            return type(ctx)(x, r, plug(b, e))
    raise ValueError(f"not a context: {ctx}")


def contains_hole(e: Term) -> bool:
    match e:
        case Hole():
            return True
        case App(f, a):
            return contains_hole(f) or contains_hole(a)
        case Anno(s, _):
            return contains_hole(s)
        case Let(_, r, b) | SlackLet(_, r, b):
            return contains_hole(r) or contains_hole(b)
        case Lam(_, b) | Fix(_, b):
            return contains_hole(b)
    return False


def decompose_eval(e: Term) -> list[tuple[Term, Term]]:
    """All ``(E, e')`` with ``E[e'] = e``, outermost first, function before argument."""
    return list(_decompose_eval(e))


@lru_cache(maxsize=1 << 16)
def _decompose_eval(e: Term) -> tuple[tuple[Term, Term], ...]:
    out = [(HOLE, e)]
    match e:
        case App(f, a):
            out += [(App(c, a), s) for c, s in decompose_eval(f)]
            if is_value(f):
                out += [(App(f, c), s) for c, s in decompose_eval(a)]
        case Anno(s0, anns):
            out += [(Anno(c, anns), s) for c, s in decompose_eval(s0)]
        case Let(x, r, b) | SlackLet(x, r, b):
            out += [(type(e)(x, c, b), s) for c, s in decompose_eval(r)]
            if is_value(r):
                out += [(type(e)(x, r, c), s) for c, s in decompose_eval(b)]
    return tuple(out)


def elongated_decompose(e: Term) -> list[tuple[Term, Term]]:
    """Like :func:`decompose_eval` but skipping over pre-values rather than only values."""
    out = [(HOLE, e)]
    match e:
        case App(f, a):
            out += [(App(c, a), s) for c, s in elongated_decompose(f)]
            if classify(f) is Kind.PRE_VALUE:
                out += [(App(f, c), s) for c, s in elongated_decompose(a)]
        case Anno(s0, anns):
            out += [(Anno(c, anns), s) for c, s in elongated_decompose(s0)]
        case Let(x, r, b):
            out += [(Let(x, c, b), s) for c, s in elongated_decompose(r)]
            if classify(r) is Kind.PRE_VALUE:
                out += [(Let(x, r, c), s) for c, s in elongated_decompose(b)]
        case SlackLet(x, r, b):
            out += [(SlackLet(x, c, b), s) for c, s in elongated_decompose(r)]
            if is_value(r):
                out += [(SlackLet(x, r, c), s) for c, s in elongated_decompose(b)]
    return out


def in_elongated_position(e: Term, name: str) -> bool:
    target = LinVar(name)
    return any(s == target for _, s in elongated_decompose(e))


# ---------------------------------------------------------------------------
# Alpha equivalence


def alpha_eq(e1: Term, e2: Term) -> bool:
    return _alpha(e1, e2, {}, {}, 0)


def _alpha(a, b, env1, env2, depth):
    # env maps a bound name to the depth of its binder; ordinary and linear
    # binders live in separate name spaces, tagged by the key prefix
    match a, b:
        case (Var(x), Var(y)) | (FixVar(x), FixVar(y)):
            return env1.get(("o", x), x) == env2.get(("o", y), y)
        case LinVar(x), LinVar(y):
            return env1.get(("l", x), x) == env2.get(("l", y), y)
        case (Lam(x, p), Lam(y, q)) | (Fix(x, p), Fix(y, q)):
            if type(a) is not type(b):
                return False
            return _alpha(p, q, {**env1, ("o", x): depth}, {**env2, ("o", y): depth}, depth + 1)
        case App(f1, a1), App(f2, a2):
            return _alpha(f1, f2, env1, env2, depth) and _alpha(a1, a2, env1, env2, depth)
        case Anno(s1, n1), Anno(s2, n2):
            return n1 == n2 and _alpha(s1, s2, env1, env2, depth)
        case (Let(x, r1, b1), Let(y, r2, b2)) | (SlackLet(x, r1, b1), SlackLet(y, r2, b2)):
            if type(a) is not type(b):
                return False
            return _alpha(r1, r2, env1, env2, depth) and _alpha(
                b1, b2, {**env1, ("l", x): depth}, {**env2, ("l", y): depth}, depth + 1
            )
        case Hole(), Hole():
            return True
    return False
