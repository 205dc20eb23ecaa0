"""Small-step call-by-value evaluation of source terms."""
from __future__ import annotations

from dataclasses import dataclass

from .syntax import Anno, App, Fix, FixVar, Lam, Term, Var, is_value, subst


@dataclass(frozen=True)
class Stepped:
    term: Term


@dataclass(frozen=True)
class IsValue:
    pass


@dataclass(frozen=True)
class Stuck:
    reason: str


StepResult = Stepped | IsValue | Stuck


def _strip(e: Term) -> Term:
    while isinstance(e, Anno):
        e = e.subject
    return e


def step(e: Term) -> StepResult:
    """One leftmost reduction; annotations are transparent when a value is consumed."""
    if is_value(e):
        return IsValue()
    return _step(e)


def _step(e: Term) -> Stepped | Stuck:
    # walk down to the redex with an explicit stack: terms such as
    # (fix u => u u) grow a new frame on every step
    frames: list[tuple[str, object]] = []
    while True:
        match e:
            case Fix(u, body):
                e = subst(body, FixVar(u), e)
                break
            case FixVar(u):
                return Stuck(f"free fix variable {u}")
            case Anno(s, anns):
                frames.append(("anno", anns))
                e = s
            case App(f, a) if not is_value(f):
                frames.append(("fn", a))
                e = f
            case App(f, a) if not is_value(a):
                frames.append(("arg", f))
                e = a
            case App(f, a):
                fn = _strip(f)
                if isinstance(fn, Lam):
                    e = subst(fn.body, Var(fn.var), a)
                    break
                if isinstance(fn, Var):
                    return Stuck(f"free variable {fn.name} in function position")
                return Stuck(f"cannot apply {fn}")
            case _:
                return Stuck(f"no rule for {e}")
    for kind, other in reversed(frames):
        match kind:
            case "anno":
                e = Anno(e, other)
            case "fn":
                e = App(e, other)
            case "arg":
                e = App(other, e)
    return Stepped(e)


@dataclass(frozen=True)
class EvalResult:
    status: str  # "value", "stuck" or "out-of-steps"
    term: Term
    steps: int
    reason: str = ""

    def __str__(self):
        extra = f" ({self.reason})" if self.reason else ""
        return f"{self.status} after {self.steps} steps: {self.term}{extra}"


def evaluate(e: Term, max_steps: int = 1000) -> EvalResult:
    """Iterate ``step`` up to ``max_steps`` times.

    Runs as a machine that keeps the evaluation context between steps instead
    of rediscovering it, so each step costs time proportional to the redex.
    """
    frames: list[tuple[str, object]] = []
    steps = 0

    def result(status: str, focus: Term, reason: str = "") -> EvalResult:
        for kind, other in reversed(frames):
            focus = Anno(focus, other) if kind == "anno" else App(focus, other) if kind == "fn" else App(other, focus)
        return EvalResult(status, focus, steps, reason)

    while True:
        if is_value(e):
            if not frames:
                return result("value", e)
            kind, other = frames.pop()
            e = Anno(e, other) if kind == "anno" else App(e, other) if kind == "fn" else App(other, e)
            continue
        match e:
            case Anno(s, anns):
                frames.append(("anno", anns))
                e = s
                continue
            case App(f, a) if not is_value(f):
                frames.append(("fn", a))
                e = f
                continue
            case App(f, a) if not is_value(a):
                frames.append(("arg", f))
                e = a
                continue
        r = _step(e)
        if isinstance(r, Stuck):
            return result("stuck", e, r.reason)
        if steps == max_steps:
            return result("out-of-steps", e)
        e = r.term
        steps += 1
