"""Resolve surface terms against an environment into kernel terms."""
from __future__ import annotations

from ..kernel import (
    App, ConstRef, CtorRef, ElimRef, GlobalEnv, IndRef, Lam, Pi, Sort, Term,
    Var, PROP, SET, TYPE0, TYPE1, TYPE2,
)
from .ast import SApp, SArrow, SBind, SElim, SName, SNum, SSort, STerm
from .lexer import ParseError

_SORT_MAP = {"Prop": PROP, "Set": SET, "Type0": TYPE0, "Type1": TYPE1, "Type2": TYPE2}


class ResolveError(Exception):
    pass


def resolve_sort(s: STerm) -> Sort:
    if isinstance(s, SSort):
        return _SORT_MAP[s.text]
    raise ResolveError(f"expected a sort, found {s!r}")


def _numeral(env: GlobalEnv, n: int) -> Term:
    if "nat" not in env.inductives:
        raise ResolveError("numerals need the inductive nat in scope")
    t: Term = CtorRef("nat", 0)
    for _ in range(n):
        t = App(CtorRef("nat", 1), t)
    return t


def resolve(env: GlobalEnv, t: STerm, locals_: tuple[str, ...] = ()) -> Term:
    """locals_ is the binder stack, innermost last."""
    match t:
        case SName(name):
            for depth, lname in enumerate(reversed(locals_)):
                if lname == name:
                    return Var(depth)
            hit = env.ctor_lookup(name)
            if hit is not None:
                return CtorRef(hit[0], hit[1])
            if name in env.inductives:
                return IndRef(name)
            if name in env.definitions:
                return ConstRef(name)
            raise ResolveError(f"unknown name {name!r}")
        case SSort(text):
            return _SORT_MAP[text]
        case SNum(v):
            return _numeral(env, v)
        case SApp(fn, arg):
            return App(resolve(env, fn, locals_), resolve(env, arg, locals_))
        case SArrow(lhs, rhs):
            return Pi("_", resolve(env, lhs, locals_), resolve(env, rhs, locals_ + ("_",)))
        case SBind(kind, name, ty, body):
            dom = resolve(env, ty, locals_)
            inner = resolve(env, body, locals_ + (name,))
            return (Lam if kind == "fun" else Pi)(name, dom, inner)
        case SElim(ind, sort):
            if ind not in env.inductives:
                raise ResolveError(f"unknown inductive {ind!r}")
            return ElimRef(ind, _SORT_MAP[sort])
    raise ResolveError(f"cannot resolve {t!r}")
