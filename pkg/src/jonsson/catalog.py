"""Pattern paths and the named Maltsev conditions they encode.

A pattern path on n vertices x̄ = s1, ..., sn = z̄ assigns to every position
i < n one of three arrow kinds between s_i and s_{i+1}.  A right dashed arrow
is never part of a pattern since it is always trivially realized.

Identity sets are generated from the pattern: the step term t_i restricted
towards each of its two endpoints must agree with the neighbouring step term,
the endpoints x̄ and z̄ are the two projections, and solid steps also satisfy
x ≈ t_i(x, y, x).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .terms import X, Z, Identity, Restriction, Term, app, restrict, var


class Arrow(Enum):
    RIGHT = ">"
    LEFT = "<"
    LEFT_DASHED = "L"

    @property
    def solid(self) -> bool:
        return self is not Arrow.LEFT_DASHED

    @property
    def symbol(self) -> str:
        return {"RIGHT": "→", "LEFT": "←", "LEFT_DASHED": "⇠"}[self.name]


class CatalogError(ValueError):
    pass


def parse_arrows(text: str) -> tuple[Arrow, ...]:
    """Parse the CLI arrow alphabet: ``>``, ``<`` and ``L`` (or ``d<``)."""
    out = []
    i = 0
    text = text.replace(" ", "").replace(",", "")
    while i < len(text):
        if text.startswith("d<", i):
            out.append(Arrow.LEFT_DASHED)
            i += 2
            continue
        ch = text[i]
        if ch == ">":
            out.append(Arrow.RIGHT)
        elif ch == "<":
            out.append(Arrow.LEFT)
        elif ch in "Ll":
            out.append(Arrow.LEFT_DASHED)
        else:
            raise CatalogError(f"bad arrow character {ch!r} at {i}")
        i += 1
    if not out:
        raise CatalogError("empty arrow pattern")
    return tuple(out)


@dataclass(frozen=True)
class PatternPath:
    arrows: tuple

    @property
    def n(self) -> int:
        return len(self.arrows) + 1

    def __str__(self):
        return "".join(a.value for a in self.arrows)

    def pretty(self) -> str:
        parts = ["x̄"]
        for i, arrow in enumerate(self.arrows, start=2):
            parts.append(arrow.symbol)
            parts.append("z̄" if i == self.n else f"s{i}")
        return " ".join(parts)

    @classmethod
    def parse(cls, text: str) -> "PatternPath":
        return cls(parse_arrows(text))


R, L, D = Arrow.RIGHT, Arrow.LEFT, Arrow.LEFT_DASHED

CONDITIONS = (
    "jonsson", "directed-jonsson", "alvin", "gumm", "defective-gumm",
    "directed-gumm", "pixley", "n-permutable", "alvin-heads",
    "two-headed-directed-gumm",
)


def catalog_path(name: str, n: int | None = None) -> PatternPath:
    if name == "pixley":
        if n not in (None, 2):
            raise CatalogError("pixley is the n=2 pattern x̄ ← z̄")
        return PatternPath((L,))
    if name not in CONDITIONS:
        raise CatalogError(f"unknown condition {name!r}")
    if n is None:
        raise CatalogError(f"condition {name!r} needs n")
    minimum = {"defective-gumm": 4, "alvin-heads": 3,
               "two-headed-directed-gumm": 3}.get(name, 2)
    if n < minimum:
        raise CatalogError(f"{name} needs n >= {minimum}")
    steps = range(1, n)
    if name == "jonsson":
        arrows = [R if i % 2 else L for i in steps]
    elif name == "directed-jonsson":
        arrows = [R] * (n - 1)
    elif name == "alvin":
        arrows = [L if i % 2 else R for i in steps]
    elif name == "gumm":
        # terms and variables exchanged: alternating, ending → s_{n-1} ⇠ z̄
        arrows = [R if (i % 2) == (n % 2) else L for i in range(1, n - 1)] + [D]
    elif name == "defective-gumm":
        if n % 2:
            raise CatalogError("defective-gumm needs n even")
        arrows = [D] + [R if i % 2 == 0 else L for i in range(2, n - 1)] + [D]
    elif name == "directed-gumm":
        arrows = [R] * (n - 2) + [D]
    elif name == "n-permutable":
        arrows = [D] * (n - 1)
    elif name == "alvin-heads":
        arrows = [L] + [R] * (n - 3) + [L]
    else:  # two-headed-directed-gumm
        arrows = [D] + [R] * (n - 3) + [D]
    return PatternPath(tuple(arrows))


def mirror(pattern: PatternPath) -> PatternPath:
    """Exchange the order of terms and the variables x, z.

    An edge s → r witnessed by t becomes an edge in the same direction in the
    reversed path, witnessed by t(z, y, x); hence only the order flips.
    """
    return PatternPath(tuple(reversed(pattern.arrows)))


def mirror_terms(terms: list[Term]) -> list[Term]:
    from .terms import substitute
    swap = {"x": Z, "z": X}
    return [substitute(t, swap) for t in reversed(terms)]


def step_symbols(n: int) -> list[str]:
    return [f"t{i}" for i in range(1, n)]


def _toward(arrow: Arrow, into_next: bool) -> Restriction:
    """Restriction of a step term evaluated at one of its endpoints.

    For s_i → s_{i+1} the term gives s_i at XXZ and s_{i+1} at XZZ; for the
    two left kinds the roles swap.
    """
    if arrow is Arrow.RIGHT:
        return Restriction.XZZ if into_next else Restriction.XXZ
    return Restriction.XXZ if into_next else Restriction.XZZ


def point_from_step(arrow: Arrow, term: Term) -> Term:
    """The representative of s_{i+1} read off the step term t_i."""
    return restrict(term, _toward(arrow, True))


def pattern_identities(pattern: PatternPath, terms: list[Term] | None = None) -> list[Identity]:
    n = pattern.n
    if terms is None:
        terms = [app(f"t{i}", var("x"), var("y"), var("z")) for i in range(1, n)]
    ids = []
    for i, (arrow, t) in enumerate(zip(pattern.arrows, terms), start=1):
        if arrow.solid:
            ids.append(Identity(X, restrict(t, Restriction.XYX), f"solid:{i}"))
    for i in range(1, n + 1):
        if i == 1:
            lhs = X
        else:
            lhs = restrict(terms[i - 2], _toward(pattern.arrows[i - 2], True))
        if i == n:
            rhs = Z
        else:
            rhs = restrict(terms[i - 1], _toward(pattern.arrows[i - 1], False))
        ids.append(Identity(lhs, rhs, f"link:{i}"))
    return ids


def identity_set(condition: str, n: int | None = None) -> list[Identity]:
    """Hypothesis identities of a named condition over the symbols t1..t_{n-1}."""
    return pattern_identities(catalog_path(condition, n))
