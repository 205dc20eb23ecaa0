"""
Subtyping ``A <= B`` for arrows, intersections, unions and bot.

Base atoms are only related to themselves.  ``/\\`` does not distribute over
``->``, so ``(P -> Q) /\\ (P -> R) <= P -> Q /\\ R`` is not derivable.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .syntax import Arrow, Base, Bot, Intersect, Type, Union

# rule names
ARROW = "arrow"
AND_L1 = "andL1"
AND_L2 = "andL2"
AND_R = "andR"
BOT_L = "botL"
OR_L = "orL"
OR_R1 = "orR1"
OR_R2 = "orR2"
BASE_REFL = "base-refl"

RULES = (ARROW, AND_L1, AND_L2, AND_R, BOT_L, OR_L, OR_R1, OR_R2, BASE_REFL)


@dataclass(frozen=True)
class SubDerivation:
    rule: str
    sub: Type
    sup: Type
    children: tuple[SubDerivation, ...] = ()

    def __str__(self):
        return f"{self.sub} <= {self.sup}  [{self.rule}]"


@lru_cache(maxsize=None)
def subtype(a: Type, b: Type) -> bool:
    # invertible rules first; afterwards every remaining rule is tried
    if isinstance(a, Bot):
        return True
    if isinstance(b, Intersect):
        return subtype(a, b.left) and subtype(a, b.right)
    if isinstance(a, Union):
        return subtype(a.left, b) and subtype(a.right, b)
    if isinstance(a, Base) and isinstance(b, Base) and a.name == b.name:
        return True
    if isinstance(a, Arrow) and isinstance(b, Arrow):
        if subtype(b.dom, a.dom) and subtype(a.cod, b.cod):
            return True
    if isinstance(a, Intersect):
        if subtype(a.left, b) or subtype(a.right, b):
            return True
    if isinstance(b, Union):
        if subtype(a, b.left) or subtype(a, b.right):
            return True
    return False


def subtype_derivation(a: Type, b: Type) -> SubDerivation | None:
    """A derivation of ``a <= b`` following the same strategy as :func:`subtype`."""
    if not subtype(a, b):
        return None
    if isinstance(a, Bot):
        return SubDerivation(BOT_L, a, b)
    if isinstance(b, Intersect):
        return SubDerivation(AND_R, a, b, (subtype_derivation(a, b.left), subtype_derivation(a, b.right)))
    if isinstance(a, Union):
        return SubDerivation(OR_L, a, b, (subtype_derivation(a.left, b), subtype_derivation(a.right, b)))
    if isinstance(a, Base) and a == b:
        return SubDerivation(BASE_REFL, a, b)
    if isinstance(a, Arrow) and isinstance(b, Arrow):
        if subtype(b.dom, a.dom) and subtype(a.cod, b.cod):
            return SubDerivation(ARROW, a, b, (subtype_derivation(b.dom, a.dom), subtype_derivation(a.cod, b.cod)))
    if isinstance(a, Intersect):
        if subtype(a.left, b):
            return SubDerivation(AND_L1, a, b, (subtype_derivation(a.left, b),))
        if subtype(a.right, b):
            return SubDerivation(AND_L2, a, b, (subtype_derivation(a.right, b),))
    if isinstance(b, Union):
        if subtype(a, b.left):
            return SubDerivation(OR_R1, a, b, (subtype_derivation(a, b.left),))
        return SubDerivation(OR_R2, a, b, (subtype_derivation(a, b.right),))
    raise AssertionError("subtype and subtype_derivation disagree")


def check_sub_derivation(d: SubDerivation) -> list[str]:
    """Replay ``d`` against the rule schemas; returns the list of problems found."""
    errors: list[str] = []
    a, b, kids = d.sub, d.sup, d.children

    def premise(i, sub, sup):
        if i >= len(kids):
            errors.append(f"{d.rule}: missing premise {i}")
        elif (kids[i].sub, kids[i].sup) != (sub, sup):
            errors.append(f"{d.rule}: premise {i} is {kids[i].sub} <= {kids[i].sup}, expected {sub} <= {sup}")

    arity = {BOT_L: 0, BASE_REFL: 0, AND_L1: 1, AND_L2: 1, OR_R1: 1, OR_R2: 1, ARROW: 2, AND_R: 2, OR_L: 2}
    if d.rule not in arity:
        return [f"unknown subtyping rule {d.rule!r}"]
    if len(kids) != arity[d.rule]:
        errors.append(f"{d.rule}: expected {arity[d.rule]} premises, got {len(kids)}")
    match d.rule:
        case "botL":
            if not isinstance(a, Bot):
                errors.append(f"botL on {a}")
        case "base-refl":
            if not (isinstance(a, Base) and a == b):
                errors.append(f"base-refl on {a} <= {b}")
        case "arrow":
            if isinstance(a, Arrow) and isinstance(b, Arrow):
                premise(0, b.dom, a.dom)
                premise(1, a.cod, b.cod)
            else:
                errors.append(f"arrow on {a} <= {b}")
        case "andL1" | "andL2":
            if isinstance(a, Intersect):
                premise(0, a.left if d.rule == AND_L1 else a.right, b)
            else:
                errors.append(f"{d.rule} on {a}")
        case "andR":
            if isinstance(b, Intersect):
                premise(0, a, b.left)
                premise(1, a, b.right)
            else:
                errors.append(f"andR on {b}")
        case "orL":
            if isinstance(a, Union):
                premise(0, a.left, b)
                premise(1, a.right, b)
            else:
                errors.append(f"orL on {a}")
        case "orR1" | "orR2":
            if isinstance(b, Union):
                premise(0, a, b.left if d.rule == OR_R1 else b.right)
            else:
                errors.append(f"{d.rule} on {b}")
    for k in kids:
        errors.extend(check_sub_derivation(k))
    return errors


_oracle_visiting: set = set()


@lru_cache(maxsize=None)
def subtype_oracle(a: Type, b: Type) -> bool:
    """Declarative search: try every rule whose conclusion matches, in no particular order."""
    key = (a, b)
    if key in _oracle_visiting:
        return False
    _oracle_visiting.add(key)
    try:
        goals = []
        if isinstance(a, Bot):
            goals.append([])
        if isinstance(a, Base) and a == b:
            goals.append([])
        if isinstance(a, Arrow) and isinstance(b, Arrow):
            goals.append([(b.dom, a.dom), (a.cod, b.cod)])
        if isinstance(a, Intersect):
            goals.append([(a.left, b)])
            goals.append([(a.right, b)])
        if isinstance(b, Intersect):
            goals.append([(a, b.left), (a, b.right)])
        if isinstance(a, Union):
            goals.append([(a.left, b), (a.right, b)])
        if isinstance(b, Union):
            goals.append([(a, b.left)])
            goals.append([(a, b.right)])
        return any(all(subtype_oracle(*g) for g in premises) for premises in goals)
    finally:
        _oracle_visiting.discard(key)
