"""Reduction: beta, delta, native iota, and a fast evaluator for closed terms."""
from __future__ import annotations

import sys

from .env import Context, GlobalEnv, IllTyped
from .terms import (
    App, ConstRef, CtorRef, ElimRef, IndRef, Lam, Pi, Sort, Term, Var,
    lift, mk_app, spine, subst,
)

# term trees and proofs nest deeply; the default CPython limit is too small
if sys.getrecursionlimit() < 100_000:
    sys.setrecursionlimit(100_000)


def elim_spine_length(env: GlobalEnv, ind_name: str) -> int:
    decl = env.inductive(ind_name)
    if decl.special_eq:
        return 6  # A x P f y e
    return decl.n_params + 1 + len(decl.ctors) + 1


def iota_contract(env: GlobalEnv, head: ElimRef, args: list[Term]) -> Term | None:
    """Contract an eliminator applied to a constructor, if the spine is full."""
    decl = env.inductive(head.ind)
    needed = elim_spine_length(env, head.ind)
    if len(args) < needed:
        return None
    scrut = whnf(env, None, args[needed - 1])
    shead, sargs = spine(scrut)
    if not isinstance(shead, CtorRef) or shead.ind != head.ind:
        return None
    if decl.special_eq:
        # elim(eq) A x P f y e  with e = eq_refl A' x'  -->  f
        result = args[3]
        rest = args[needed:]
        return mk_app(result, *rest)
    j = shead.index
    ctor = decl.ctors[j]
    if len(sargs) != decl.n_params + len(ctor.args):
        return None  # under-applied constructor; cannot fire
    value_args = sargs[decl.n_params:]
    method = args[decl.n_params + 1 + j]
    recpos = decl.recursive_positions(ctor)
    call_args: list[Term] = []
    prefix = args[: needed - 1]  # params, motive, methods
    for v, is_rec in zip(value_args, recpos):
        call_args.append(v)
        if is_rec:
            call_args.append(mk_app(head, *prefix, v))
    return mk_app(method, *call_args, *args[needed:])


def whnf(env: GlobalEnv, ctx: Context | None, t: Term) -> Term:
    """Weak head normal form under beta, delta, and native iota."""
    while True:
        head, args = spine(t)
        if isinstance(head, Lam) and args:
            t = mk_app(subst(head.body, args[0]), *args[1:])
            continue
        if isinstance(head, ConstRef):
            d = env.definition(head.name)
            if d is not None:
                t = mk_app(d.body, *args)
                continue
            raise IllTyped(f"unknown constant {head.name}")
        if isinstance(head, Var) and ctx is not None:
            i = head.index
            if 0 <= i < len(ctx.entries):
                body = ctx.entries[-1 - i][2]
                if body is not None:
                    t = mk_app(lift(body, i + 1), *args)
                    continue
        if isinstance(head, ElimRef):
            contracted = iota_contract(env, head, args)
            if contracted is not None:
                t = contracted
                continue
        return t


def normalize(env: GlobalEnv, ctx: Context | None, t: Term) -> Term:
    """Full normal form; terminates on well-typed terms."""
    t = whnf(env, ctx, t)
    match t:
        case Lam(x, d, b):
            inner = ctx.push(x, d) if ctx is not None else None
            return Lam(x, normalize(env, ctx, d), normalize(env, inner, b))
        case Pi(x, d, b):
            inner = ctx.push(x, d) if ctx is not None else None
            return Pi(x, normalize(env, ctx, d), normalize(env, inner, b))
        case App(_, _):
            head, args = spine(t)
            return mk_app(head, *[normalize(env, ctx, a) for a in args])
        case _:
            return t


# ---------------------------------------------------------------------------
# Closed-term evaluator (call-by-value with closures).
#
# Used by correspondence checking, where many closed applications must reduce
# to constructor form quickly; substitution-based whnf would be far slower.
# ---------------------------------------------------------------------------


class VCtor:
    __slots__ = ("ind", "index", "args")

    def __init__(self, ind: str, index: int, args: list):
        self.ind = ind
        self.index = index
        self.args = args


class VFun:
    __slots__ = ("fn",)

    def __init__(self, fn):
        self.fn = fn


class VOpaque:
    """Sorts, Pi types, and applied type formers; never scrutinized."""

    __slots__ = ("tag", "args")

    def __init__(self, tag, args=()):
        self.tag = tag
        self.args = args


class VThunk:
    """Deferred recursive result; forced only when inspected or applied."""

    __slots__ = ("fn", "val")

    def __init__(self, fn):
        self.fn = fn
        self.val = None


def force(v):
    while isinstance(v, VThunk):
        if v.val is None:
            v.val = v.fn()
            v.fn = None
        v = v.val
    return v


class NonClosedValue(Exception):
    pass


def _curry(arity: int, make):
    if arity == 0:
        return make([])

    def collect(acc):
        return VFun(lambda v: make(acc + [v]) if len(acc) + 1 == arity else collect(acc + [v]))

    return collect([])


class Evaluator:
    """Compiles terms to Python closures; compiled code is cached per term
    identity, and closed constants are evaluated once."""

    def __init__(self, env: GlobalEnv):
        self.env = env
        self._const_cache: dict[str, object] = {}
        self._code: dict[int, object] = {}
        self._elim_cache: dict[tuple[str, str, int], object] = {}
        self._ind_info: dict[str, tuple[int, int, list[list[bool]], bool]] = {}

    def _info(self, name: str):
        got = self._ind_info.get(name)
        if got is None:
            decl = self.env.inductive(name)
            recpos = [decl.recursive_positions(c) for c in decl.ctors]
            got = (decl.n_params, elim_spine_length(self.env, name), recpos,
                   decl.special_eq)
            self._ind_info[name] = got
        return got

    def apply(self, f, v):
        f = force(f)
        if isinstance(f, VFun):
            return f.fn(v)
        raise NonClosedValue(f"application head is not a function value: {f!r}")

    def eval_const(self, name: str):
        got = self._const_cache.get(name)
        if got is None:
            d = self.env.definition(name)
            if d is None:
                raise IllTyped(f"unknown constant {name}")
            got = self.compile(d.body)([])
            self._const_cache[name] = got
        return got

    def _elim_value(self, head: ElimRef):
        key = (head.ind, head.sort.kind, head.sort.level)
        got = self._elim_cache.get(key)
        if got is not None:
            return got
        n_params, needed, recpos, special = self._info(head.ind)

        if special:
            def run_eq(vals):
                e = force(vals[5])
                if isinstance(e, VCtor) and e.ind == "eq":
                    return vals[3]
                raise NonClosedValue("eq eliminator stuck")

            got = _curry(6, run_eq)
            self._elim_cache[key] = got
            return got

        ind = head.ind

        def run(vals):
            scrut = force(vals[needed - 1])
            if not (isinstance(scrut, VCtor) and scrut.ind == ind):
                raise NonClosedValue(f"eliminator of {ind} stuck")
            method = vals[n_params + 1 + scrut.index]
            rp = recpos[scrut.index]
            out = force(method)
            for v, is_rec in zip(scrut.args[n_params:], rp):
                out = out.fn(v) if isinstance(out, VFun) else _bad(force(out))
                out = force(out)
                if is_rec:
                    rec = VThunk(lambda sub=vals[: needed - 1] + [v]: run(sub))
                    out = out.fn(rec) if isinstance(out, VFun) else _bad(out)
                    out = force(out)
            return out

        got = _curry(needed, run)
        self._elim_cache[key] = got
        return got

    def compile(self, t: Term):
        code = self._code.get(id(t))
        if code is None:
            code = self._compile(t)
            self._code[id(t)] = code
            self._keepalive = getattr(self, "_keepalive", [])
            self._keepalive.append(t)
        return code

    def _compile(self, t: Term):
        tt = type(t)
        if tt is Var:
            i = t.index
            return lambda stack: stack[-1 - i]
        if tt is App:
            cf = self.compile(t.fn)
            ca = self.compile(t.arg)

            def app_code(stack):
                f = force(cf(stack))
                if isinstance(f, VFun):
                    return f.fn(ca(stack))
                raise NonClosedValue("application head is not a function value")

            return app_code
        if tt is Lam:
            cb = self.compile(t.body)
            return lambda stack: VFun(lambda v, s=stack: cb(s + [v]))
        if tt is ConstRef:
            name = t.name
            return lambda stack: self.eval_const(name)
        if tt is CtorRef:
            n_params, _, recpos, special = self._info(t.ind)
            if special:
                arity = 2
            else:
                decl = self.env.inductive(t.ind)
                arity = n_params + len(decl.ctors[t.index].args)
            ind, j = t.ind, t.index
            if arity == 0:
                v = VCtor(ind, j, [])
                return lambda stack: v
            made = _curry(arity, lambda vals: VCtor(ind, j, vals))
            return lambda stack: made
        if tt is ElimRef:
            v = self._elim_value(t)
            return lambda stack: v
        if tt is IndRef:
            n_params, _, _, special = self._info(t.name)
            arity = n_params + (1 if special else 0)
            if arity == 0:
                v = VOpaque(t)
                return lambda stack: v
            made = _curry(arity, lambda vals, t=t: VOpaque(t, tuple(vals)))
            return lambda stack: made
        if tt is Sort or tt is Pi:
            v = VOpaque(t)
            return lambda stack: v
        raise NonClosedValue(f"cannot evaluate {t!r}")

    def eval(self, t: Term, stack: list):
        return self.compile(t)(stack)

    def readback(self, v) -> Term:
        """Convert a constructor-tree value back to a term; fails on closures."""
        v = force(v)
        if isinstance(v, VCtor):
            args = [self.readback(a) for a in v.args]
            return mk_app(CtorRef(v.ind, v.index), *args)
        if isinstance(v, VOpaque) and isinstance(v.tag, (IndRef, Sort)):
            return mk_app(v.tag, *[self.readback(a) for a in v.args]) if v.args else v.tag
        raise NonClosedValue("value is not a constructor tree")

    def eval_closed(self, t: Term):
        return self.compile(t)([])


def _bad(v):
    raise NonClosedValue("application head is not a function value")
