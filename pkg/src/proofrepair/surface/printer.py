"""Pretty-printer for kernel terms; inverse of the parser up to alpha."""
from __future__ import annotations

from ..kernel import (
    App, ConstRef, CtorRef, ElimRef, GlobalEnv, IndRef, Lam, Pi, Sort, Term,
    Var, spine,
)
from ..kernel.terms import occurs_var

_SORT_TEXT = {("Prop", 0): "Prop", ("Set", 0): "Set",
              ("Type", 0): "Type0", ("Type", 1): "Type1", ("Type", 2): "Type2"}


def _sort_text(s: Sort) -> str:
    return _SORT_TEXT[(s.kind, s.level)]


def _as_numeral(t: Term) -> int | None:
    n = 0
    while True:
        if t == CtorRef("nat", 0):
            return n
        if isinstance(t, App) and t.fn == CtorRef("nat", 1):
            n += 1
            t = t.arg
            continue
        return None


class Printer:
    def __init__(self, env: GlobalEnv):
        self.env = env
        self.globals = set(env.definitions) | set(env.inductives)
        for decl in env.inductives.values():
            self.globals.update(c.name for c in decl.ctors)

    def fresh(self, base: str, scope: tuple[str, ...]) -> str:
        if base == "_":
            base = "x"
        name = base
        i = 0
        while name in scope or name in self.globals:
            i += 1
            name = f"{base}{i}"
        return name

    def term(self, t: Term, scope: tuple[str, ...] = ()) -> str:
        return self._t(t, scope, 0)

    # prec: 0 top, 1 arrow-lhs, 2 application, 3 atom
    def _t(self, t: Term, scope: tuple[str, ...], prec: int) -> str:
        match t:
            case Var(i):
                if i < len(scope):
                    return scope[-1 - i]
                return f"_free{i - len(scope)}"
            case Sort():
                return _sort_text(t)
            case ConstRef(n):
                return n
            case IndRef(n):
                return n
            case CtorRef(ind, j):
                decl = self.env.inductives.get(ind)
                if decl and not decl.special_eq:
                    name = decl.ctors[j].name
                elif ind == "eq":
                    name = "eq_refl"
                else:
                    name = f"{ind}_ctor{j}"
                return name
            case ElimRef(ind, s):
                return f"elim({ind}, {_sort_text(s)})"
            case App(_, _):
                num = _as_numeral(t)
                if num is not None:
                    return str(num)
                head, args = spine(t)
                parts = [self._t(head, scope, 2)] + [self._t(a, scope, 3) for a in args]
                s = " ".join(parts)
                return f"({s})" if prec >= 3 else s
            case Lam(x, d, b):
                name = self.fresh(x, scope)
                s = f"fun ({name} : {self._t(d, scope, 0)}) => " \
                    f"{self._t(b, scope + (name,), 0)}"
                return f"({s})" if prec >= 1 else s
            case Pi(x, d, b):
                if not occurs_var(b, 0):
                    s = f"{self._t(d, scope, 1)} -> {self._t(b, scope + ('_',), 0)}"
                    return f"({s})" if prec >= 1 else s
                name = self.fresh(x, scope)
                s = f"forall ({name} : {self._t(d, scope, 0)}), " \
                    f"{self._t(b, scope + (name,), 0)}"
                return f"({s})" if prec >= 1 else s
        raise ValueError(f"cannot print {t!r}")

    def definition(self, name: str, ty: Term, body: Term, opaque: bool = False) -> str:
        kw = "Opaque Definition" if opaque else "Definition"
        return f"{kw} {name} : {self.term(ty)} :=\n  {self.term(body)}."


def print_term(env: GlobalEnv, t: Term) -> str:
    return Printer(env).term(t)
