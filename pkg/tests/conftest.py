from hypothesis import strategies as st

from tridir.differential import DEFAULT_ANNOTATIONS, DEFAULT_GAMMA
from tridir.syntax import BOT, Anno, App, Arrow, Base, Fix, FixVar, Intersect, Lam, Union, Var

ATOMS = ("P", "Q")


def types(max_leaves: int = 8):
    leaves = st.sampled_from([Base(a) for a in ATOMS] + [BOT])
    return st.recursive(
        leaves,
        lambda sub: st.builds(Arrow, sub, sub) | st.builds(Intersect, sub, sub) | st.builds(Union, sub, sub),
        max_leaves=max_leaves,
    )


@st.composite
def source_terms(draw, max_size: int = 9, names=tuple(DEFAULT_GAMMA.names()), annotate: bool = True):
    """Terms over ``names``; binders are named by depth so shadowing never happens."""

    def go(n, ordinary, fixes):
        depth = len(ordinary) + len(fixes)
        choices = []
        if ordinary or fixes:
            choices.append("var")
        if n >= 2:
            choices += ["lam", "fix"]
        if n >= 3 and (ordinary or fixes):
            choices += ["app", "app"]
        if n >= 4 and annotate and (ordinary or fixes):
            choices.append("anno")
        kind = draw(st.sampled_from(choices))
        if kind == "var":
            return draw(st.sampled_from([Var(x) for x in ordinary] + [FixVar(u) for u in fixes]))
        if kind == "lam":
            v = f"v{depth}"
            return Lam(v, go(n - 1, ordinary + (v,), fixes))
        if kind == "fix":
            u = f"u{depth}"
            return Fix(u, go(n - 1, ordinary, fixes + (u,)))
        if kind == "anno":
            fn = Anno(go(draw(st.integers(1, n - 3)), ordinary, fixes), draw(st.sampled_from(DEFAULT_ANNOTATIONS)))
            return App(fn, go(n - 1 - fn.size, ordinary, fixes))
        i = draw(st.integers(1, n - 2))
        return App(go(i, ordinary, fixes), go(n - 1 - i, ordinary, fixes))

    size = draw(st.integers(1 if names else 2, max_size))
    return go(size, tuple(names), ())
