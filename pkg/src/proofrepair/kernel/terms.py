"""Term language of the kernel.

Variables are de Bruijn indices; binder display names are retained for
printing only and are excluded from equality, so structural equality of
terms is alpha-equivalence.
"""
from __future__ import annotations

from dataclasses import dataclass, field


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Sort(Term):
    """Prop, Set, or Type(level) with level in 0..2."""

    kind: str  # "Prop" | "Set" | "Type"
    level: int = 0

    def __post_init__(self):
        if self.kind not in ("Prop", "Set", "Type"):
            raise ValueError(f"bad sort kind {self.kind!r}")
        if self.kind != "Type" and self.level != 0:
            raise ValueError("only Type carries a level")
        if not 0 <= self.level <= 3:
            # level 3 exists only so Type2-targeted eliminator types are
            # themselves typeable; it is not a surface sort
            raise ValueError("Type level out of range (0..3)")

    def __repr__(self):
        return self.kind if self.kind != "Type" else f"Type{self.level}"


PROP = Sort("Prop")
SET = Sort("Set")
TYPE0 = Sort("Type", 0)
TYPE1 = Sort("Type", 1)
TYPE2 = Sort("Type", 2)

# rank order used both for cumulativity and for product formation
_SORT_RANK = {("Prop", 0): 0, ("Set", 0): 1, ("Type", 0): 2, ("Type", 1): 3,
              ("Type", 2): 4, ("Type", 3): 5}
_RANK_SORT = {v: k for k, v in _SORT_RANK.items()}


def sort_rank(s: Sort) -> int:
    return _SORT_RANK[(s.kind, s.level)]


def sort_of_rank(r: int) -> Sort:
    kind, level = _RANK_SORT[r]
    return Sort(kind, level)


def sort_le(s: Sort, t: Sort) -> bool:
    """Cumulativity: Prop <= Set <= Type0 <= Type1 <= Type2."""
    return sort_rank(s) <= sort_rank(t)


def sort_max(s: Sort, t: Sort) -> Sort:
    return sort_of_rank(max(sort_rank(s), sort_rank(t)))


@dataclass(frozen=True)
class Var(Term):
    index: int

    def __repr__(self):
        return f"#{self.index}"


@dataclass(frozen=True)
class Pi(Term):
    name: str = field(compare=False)
    domain: Term
    codomain: Term

    def __repr__(self):
        return f"Pi({self.name}:{self.domain!r}. {self.codomain!r})"


@dataclass(frozen=True)
class Lam(Term):
    name: str = field(compare=False)
    domain: Term
    body: Term

    def __repr__(self):
        return f"Lam({self.name}:{self.domain!r}. {self.body!r})"


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term

    def __repr__(self):
        return f"({self.fn!r} {self.arg!r})"


@dataclass(frozen=True)
class ConstRef(Term):
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class IndRef(Term):
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class CtorRef(Term):
    ind: str
    index: int

    def __repr__(self):
        return f"{self.ind}.{self.index}"


@dataclass(frozen=True)
class ElimRef(Term):
    ind: str
    sort: Sort

    def __repr__(self):
        return f"elim({self.ind},{self.sort!r})"


def mk_app(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Decompose nested applications into (head, [args])."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def lift(t: Term, n: int, cutoff: int = 0) -> Term:
    """Add n to every variable index >= cutoff."""
    if n == 0:
        return t
    match t:
        case Var(i):
            return Var(i + n) if i >= cutoff else t
        case App(f, a):
            return App(lift(f, n, cutoff), lift(a, n, cutoff))
        case Lam(x, d, b):
            return Lam(x, lift(d, n, cutoff), lift(b, n, cutoff + 1))
        case Pi(x, d, b):
            return Pi(x, lift(d, n, cutoff), lift(b, n, cutoff + 1))
        case _:
            return t


def subst(t: Term, value: Term, index: int = 0) -> Term:
    """Substitute value for the variable bound at depth index.

    Free variables above index are shifted down by one; value is lifted as it
    moves under binders, so capture cannot occur.
    """
    match t:
        case Var(i):
            if i == index:
                return lift(value, index)
            return Var(i - 1) if i > index else t
        case App(f, a):
            return App(subst(f, value, index), subst(a, value, index))
        case Lam(x, d, b):
            return Lam(x, subst(d, value, index), subst(b, value, index + 1))
        case Pi(x, d, b):
            return Pi(x, subst(d, value, index), subst(b, value, index + 1))
        case _:
            return t


def subst_many(t: Term, values: list[Term]) -> Term:
    """Substitute values for variables 0..len-1 (values[0] for Var 0)."""
    for v in values:
        t = subst(t, v, 0)
    return t


def occurs_var(t: Term, index: int) -> bool:
    match t:
        case Var(i):
            return i == index
        case App(f, a):
            return occurs_var(f, index) or occurs_var(a, index)
        case Lam(_, d, b) | Pi(_, d, b):
            return occurs_var(d, index) or occurs_var(b, index + 1)
        case _:
            return False


def contains(t: Term, needle: Term) -> bool:
    """Does needle occur in t as a closed subterm (alpha-syntactic)?"""
    if t == needle:
        return True
    match t:
        case App(f, a):
            return contains(f, needle) or contains(a, needle)
        case Lam(_, d, b) | Pi(_, d, b):
            # needle is closed, so no index adjustment is needed under binders
            return contains(d, needle) or contains(b, needle)
        case _:
            return False


def replace(t: Term, needle: Term, repl: Term, depth: int = 0) -> Term:
    """Replace every occurrence of the closed term needle with repl.

    repl may mention variables; it is lifted when descending under binders.
    """
    if t == lift(needle, depth):
        return lift(repl, depth)
    match t:
        case App(f, a):
            return App(replace(f, needle, repl, depth), replace(a, needle, repl, depth))
        case Lam(x, d, b):
            return Lam(x, replace(d, needle, repl, depth), replace(b, needle, repl, depth + 1))
        case Pi(x, d, b):
            return Pi(x, replace(d, needle, repl, depth), replace(b, needle, repl, depth + 1))
        case _:
            return t


def pi_telescope(t: Term) -> tuple[list[tuple[str, Term]], Term]:
    """Split leading Pi binders into a telescope plus the final codomain."""
    tele: list[tuple[str, Term]] = []
    while isinstance(t, Pi):
        tele.append((t.name, t.domain))
        t = t.codomain
    return tele, t


def mk_pi_telescope(tele: list[tuple[str, Term]], body: Term) -> Term:
    for name, ty in reversed(tele):
        body = Pi(name, ty, body)
    return body


def mk_lam_telescope(tele: list[tuple[str, Term]], body: Term) -> Term:
    for name, ty in reversed(tele):
        body = Lam(name, ty, body)
    return body


def constants_in(t: Term) -> set[str]:
    out: set[str] = set()

    def go(u: Term):
        match u:
            case ConstRef(n):
                out.add(n)
            case App(f, a):
                go(f)
                go(a)
            case Lam(_, d, b) | Pi(_, d, b):
                go(d)
                go(b)
            case _:
                pass

    go(t)
    return out


def inductives_in(t: Term) -> set[str]:
    out: set[str] = set()

    def go(u: Term):
        match u:
            case IndRef(n):
                out.add(n)
            case CtorRef(n, _):
                out.add(n)
            case ElimRef(n, _):
                out.add(n)
            case App(f, a):
                go(f)
                go(a)
            case Lam(_, d, b) | Pi(_, d, b):
                go(d)
                go(b)
            case _:
                pass

    go(t)
    return out
