"""Global environments, local contexts, and inductive declarations.

All values are immutable; extension returns a new value. Every definition
carries a body (there is no axiom form), so any proof checked against an
environment is grounded in closed terms.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace as dc_replace

from .terms import (
    Term, Sort, Var, Pi, IndRef, lift, mk_app, mk_pi_telescope, spine,
    PROP, TYPE1,
)


class KernelError(Exception):
    pass


class IllTyped(KernelError):
    def __init__(self, reason: str, location: Term | None = None):
        self.reason = reason
        self.location = location
        loc = f" in {location!r}" if location is not None else ""
        super().__init__(f"{reason}{loc}")


class DuplicateName(KernelError):
    pass


class PositivityViolation(KernelError):
    pass


class SortRestriction(KernelError):
    pass


@dataclass(frozen=True)
class CtorDecl:
    name: str
    # argument telescope over the parameters; recursive positions are exactly
    # the inductive applied to its parameter variables
    args: tuple[tuple[str, Term], ...]


@dataclass(frozen=True)
class InductiveDecl:
    name: str
    params: tuple[tuple[str, Term], ...]
    sort: Sort
    ctors: tuple[CtorDecl, ...]
    # eq is declared internally with one extra index treated specially by the
    # type checker and reducer
    special_eq: bool = False

    @property
    def n_params(self) -> int:
        return len(self.params)

    def self_applied(self, depth_above_params: int = 0) -> Term:
        """The inductive applied to its own parameter variables.

        depth_above_params is how many binders sit between the parameter
        telescope and the use site.
        """
        n = self.n_params
        args = [Var(n - 1 - i + depth_above_params) for i in range(n)]
        return mk_app(IndRef(self.name), *args)

    def recursive_positions(self, ctor: CtorDecl) -> list[bool]:
        """For each constructor argument, whether it is a recursive position."""
        out = []
        for i, (_, ty) in enumerate(ctor.args):
            out.append(ty == self.self_applied(i))
        return out


@dataclass(frozen=True)
class Definition:
    name: str
    type: Term
    body: Term
    opaque_for_repair: bool = False


@dataclass(frozen=True)
class Context:
    """Local typing telescope; entry 0 of `entries` is outermost."""

    entries: tuple[tuple[str, Term, Term | None], ...] = ()

    def push(self, name: str, ty: Term, body: Term | None = None) -> "Context":
        return Context(self.entries + ((name, ty, body),))

    def lookup_type(self, index: int) -> Term:
        """Type of Var(index), lifted to the current depth."""
        if not 0 <= index < len(self.entries):
            raise IllTyped(f"unbound variable #{index}")
        return lift(self.entries[-1 - index][1], index + 1)

    def lookup_name(self, index: int) -> str:
        if 0 <= index < len(self.entries):
            return self.entries[-1 - index][0]
        return f"#{index}"

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class GlobalEnv:
    definitions: dict = field(default_factory=dict)
    inductives: dict = field(default_factory=dict)
    order: tuple[str, ...] = ()

    def _check_fresh(self, name: str):
        if name in self.definitions or name in self.inductives:
            raise DuplicateName(name)
        for decl in self.inductives.values():
            for c in decl.ctors:
                if c.name == name:
                    raise DuplicateName(name)

    def with_definition(self, d: Definition) -> "GlobalEnv":
        self._check_fresh(d.name)
        defs = dict(self.definitions)
        defs[d.name] = d
        return GlobalEnv(defs, self.inductives, self.order + (d.name,))

    def with_inductive(self, decl: InductiveDecl) -> "GlobalEnv":
        self._check_fresh(decl.name)
        for c in decl.ctors:
            self._check_fresh(c.name)
        inds = dict(self.inductives)
        inds[decl.name] = decl
        return GlobalEnv(self.definitions, inds, self.order + (decl.name,))

    def definition(self, name: str) -> Definition | None:
        return self.definitions.get(name)

    def inductive(self, name: str) -> InductiveDecl:
        try:
            return self.inductives[name]
        except KeyError:
            raise IllTyped(f"unknown inductive {name}") from None

    def ctor_lookup(self, name: str) -> tuple[str, int] | None:
        for decl in self.inductives.values():
            for j, c in enumerate(decl.ctors):
                if c.name == name:
                    return decl.name, j
        return None


def eq_decl() -> InductiveDecl:
    """The built-in equality family.

    Declared with parameters (A : Type1) (x : A) and one index of type A that
    the checker and reducer handle specially; its eliminator is fixed to the
    six-argument order (A, x, P, f, y, e).
    """
    return InductiveDecl(
        name="eq",
        params=(("A", TYPE1), ("x", Var(0))),
        sort=PROP,
        ctors=(CtorDecl("eq_refl", ()),),
        special_eq=True,
    )


def initial_env() -> GlobalEnv:
    return GlobalEnv().with_inductive(eq_decl())
