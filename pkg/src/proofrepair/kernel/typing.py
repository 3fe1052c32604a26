"""Conversion, subtyping, type inference, and declaration checking."""
from __future__ import annotations

from .env import (
    Context, CtorDecl, Definition, DuplicateName, GlobalEnv, IllTyped,
    InductiveDecl, PositivityViolation, SortRestriction,
)
from .reduce import elim_spine_length, whnf
from .terms import (
    App, ConstRef, CtorRef, ElimRef, IndRef, Lam, Pi, Sort, Term, Var,
    PROP, TYPE0, TYPE1, TYPE2, contains, lift, mk_app, mk_pi_telescope,
    sort_le, sort_max, spine, subst,
)

PERMITTED_TARGET_SORTS = (PROP, Sort("Set"), TYPE0, TYPE1, TYPE2)


def conv(env: GlobalEnv, ctx: Context, t: Term, u: Term) -> bool:
    """Definitional equality: beta, delta, native iota, and function eta."""
    if t == u:
        return True
    # same-head shortcut: f a1..an ~ f b1..bn when all ai ~ bi
    th, targs = spine(t)
    uh, uargs = spine(u)
    if targs and th == uh and len(targs) == len(uargs) and not isinstance(th, Lam):
        if all(conv(env, ctx, a, b) for a, b in zip(targs, uargs)):
            return True
    wt = whnf(env, ctx, t)
    wu = whnf(env, ctx, u)
    if wt == wu:
        return True
    match (wt, wu):
        case (Pi(_, d1, c1), Pi(x, d2, c2)):
            return conv(env, ctx, d1, d2) and conv(env, ctx.push(x, d2), c1, c2)
        case (Lam(_, d1, b1), Lam(x, d2, b2)):
            return conv(env, ctx.push(x, d2), b1, b2)
        case (Lam(x, d, b), _):
            return conv(env, ctx.push(x, d), b, App(lift(wu, 1), Var(0)))
        case (_, Lam(x, d, b)):
            return conv(env, ctx.push(x, d), App(lift(wt, 1), Var(0)), b)
        case _:
            h1, a1 = spine(wt)
            h2, a2 = spine(wu)
            if h1 != h2 or len(a1) != len(a2):
                return False
            return all(conv(env, ctx, a, b) for a, b in zip(a1, a2))


def subtype(env: GlobalEnv, ctx: Context, t: Term, u: Term) -> bool:
    """t <= u with sort cumulativity, covariant in Pi codomains."""
    wt = whnf(env, ctx, t)
    wu = whnf(env, ctx, u)
    match (wt, wu):
        case (Sort(), Sort()):
            return sort_le(wt, wu)
        case (Pi(_, d1, c1), Pi(x, d2, c2)):
            return conv(env, ctx, d1, d2) and subtype(env, ctx.push(x, d2), c1, c2)
        case _:
            return conv(env, ctx, wt, wu)


def _rename_free(t: Term, mapping, depth: int = 0) -> Term:
    match t:
        case Var(i):
            return Var(mapping(i - depth) + depth) if i >= depth else t
        case App(f, a):
            return App(_rename_free(f, mapping, depth), _rename_free(a, mapping, depth))
        case Lam(x, d, b):
            return Lam(x, _rename_free(t.domain, mapping, depth), _rename_free(b, mapping, depth + 1))
        case Pi(x, d, b):
            return Pi(x, _rename_free(d, mapping, depth), _rename_free(b, mapping, depth + 1))
        case _:
            return t


def eliminator_type(env: GlobalEnv, decl: InductiveDecl, target: Sort) -> Term:
    """The dependent recursor type for decl at the given target sort."""
    if target not in PERMITTED_TARGET_SORTS:
        raise SortRestriction(f"{target!r} is not a permitted eliminator sort")
    if decl.sort == PROP and not decl.special_eq and target != PROP:
        raise SortRestriction(
            f"{decl.name} is Prop-sorted and eliminates only into Prop")

    if decl.special_eq:
        # forall (A : Type1) (x : A) (P : A -> target) (f : P x) (y : A), eq A x y -> P y
        return Pi("A", TYPE1,
               Pi("x", Var(0),
               Pi("P", Pi("_", Var(1), target),
               Pi("f", App(Var(0), Var(1)),
               Pi("y", Var(3),
               Pi("e", mk_app(IndRef("eq"), Var(4), Var(3), Var(0)),
                  App(Var(3), Var(1))))))))

    k = decl.n_params
    n = len(decl.ctors)
    binders: list[tuple[str, Term]] = list(decl.params)
    # abs positions: params 0..k-1, motive k, method j at k+1+j
    motive_abs = k

    def at_depth(abs_pos: int, depth: int) -> Term:
        return Var(depth - 1 - abs_pos)

    # motive : (I p...) -> target     (formed at depth k)
    self_at_k = mk_app(IndRef(decl.name), *[at_depth(p, k) for p in range(k)])
    binders.append(("P", Pi("_", self_at_k, target)))

    for j, ctor in enumerate(decl.ctors):
        recpos = decl.recursive_positions(ctor)
        depth = k + 1 + j  # depth at the start of method j's type
        arg_abs: list[int] = []
        method_binders: list[tuple[str, Term]] = []
        for i, (aname, aty) in enumerate(ctor.args):
            # original context of aty: params + args[0..i-1]; orig index m maps
            # to arg_{i-1-m} when m < i, else to param k-1-(m-i)
            orig_to_abs = [arg_abs[i - 1 - m] for m in range(i)] + \
                          [k - 1 - (m - i) for m in range(i, i + k)]
            d = depth

            def mapping(m, table=tuple(orig_to_abs), dd=d):
                return dd - 1 - table[m]

            method_binders.append((aname, _rename_free(aty, mapping)))
            arg_abs.append(depth)
            depth += 1
            if recpos[i]:
                # IH : P arg_i   (motive applied to the just-bound argument)
                method_binders.append(
                    (aname + "_ih", App(at_depth(motive_abs, depth), at_depth(depth - 1, depth))))
                depth += 1
        # conclusion: P (ctor p... a...)
        ctor_app = mk_app(
            CtorRef(decl.name, j),
            *[at_depth(p, depth) for p in range(k)],
            *[at_depth(a, depth) for a in arg_abs])
        concl = App(at_depth(motive_abs, depth), ctor_app)
        binders.append((f"f_{ctor.name}", mk_pi_telescope(method_binders, concl)))

    depth = k + 1 + n
    self_final = mk_app(IndRef(decl.name), *[at_depth(p, depth) for p in range(k)])
    binders.append(("x", self_final))
    depth += 1
    return mk_pi_telescope(binders, App(at_depth(motive_abs, depth), at_depth(depth - 1, depth)))


def derive_eliminator(env: GlobalEnv, decl: InductiveDecl, target: Sort) -> Term:
    return eliminator_type(env, decl, target)


def ctor_type(env: GlobalEnv, ind: str, j: int) -> Term:
    decl = env.inductive(ind)
    if not 0 <= j < len(decl.ctors):
        raise IllTyped(f"constructor index {j} out of range for {ind}")
    if decl.special_eq:
        # eq_refl : forall (A : Type1) (x : A), eq A x x
        return Pi("A", TYPE1, Pi("x", Var(0), mk_app(IndRef("eq"), Var(1), Var(0), Var(0))))
    ctor = decl.ctors[j]
    tele = list(decl.params) + list(ctor.args)
    return mk_pi_telescope(tele, decl.self_applied(len(ctor.args)))


def ind_type(env: GlobalEnv, name: str) -> Term:
    decl = env.inductive(name)
    if decl.special_eq:
        return Pi("A", TYPE1, Pi("x", Var(0), Pi("y", Var(1), PROP)))
    return mk_pi_telescope(list(decl.params), decl.sort)


def infer_sort(env: GlobalEnv, ctx: Context, ty: Term) -> Sort:
    s = whnf(env, ctx, infer_type(env, ctx, ty))
    if not isinstance(s, Sort):
        raise IllTyped(f"not a type: {ty!r}")
    return s


def infer_type(env: GlobalEnv, ctx: Context, t: Term) -> Term:
    match t:
        case Var(i):
            return ctx.lookup_type(i)
        case Sort(kind, level):
            if kind == "Type":
                if level >= 3:
                    return _raise_ceiling()
                return Sort("Type", level + 1)
            return TYPE0
        case Pi(x, d, c):
            sd = infer_sort(env, ctx, d)
            sc = infer_sort(env, ctx.push(x, d), c)
            return PROP if sc == PROP else sort_max(sd, sc)
        case Lam(x, d, b):
            infer_sort(env, ctx, d)
            tb = infer_type(env, ctx.push(x, d), b)
            return Pi(x, d, tb)
        case App(f, a):
            tf = whnf(env, ctx, infer_type(env, ctx, f))
            if not isinstance(tf, Pi):
                raise IllTyped("application of a non-function", t)
            ta = infer_type(env, ctx, a)
            if not subtype(env, ctx, ta, tf.domain):
                raise IllTyped(
                    f"argument type mismatch: got {ta!r}, expected {tf.domain!r}", t)
            return subst(tf.codomain, a)
        case ConstRef(name):
            d = env.definition(name)
            if d is None:
                raise IllTyped(f"unknown constant {name}")
            return d.type
        case IndRef(name):
            return ind_type(env, name)
        case CtorRef(ind, j):
            return ctor_type(env, ind, j)
        case ElimRef(ind, sort):
            return eliminator_type(env, env.inductive(ind), sort)
    raise IllTyped(f"cannot infer type of {t!r}")


def _raise_ceiling():
    raise IllTyped("universe ceiling reached (Type2 has no successor)")


def check_type(env: GlobalEnv, ctx: Context, t: Term, expected: Term):
    got = infer_type(env, ctx, t)
    if not subtype(env, ctx, got, expected):
        raise IllTyped(f"type mismatch: got {got!r}, expected {expected!r}", t)


def _check_positivity(decl: InductiveDecl):
    for i, ctor in enumerate(decl.ctors):
        for a, (aname, aty) in enumerate(ctor.args):
            if aty == decl.self_applied(a):
                continue
            if decl.name in _inductive_names(aty):
                raise PositivityViolation(
                    f"{decl.name} occurs non-positively in argument {aname!r} "
                    f"of constructor {ctor.name}")


def _inductive_names(t: Term) -> set[str]:
    out: set[str] = set()

    def go(u: Term):
        match u:
            case IndRef(n) | CtorRef(n, _) | ElimRef(n, _):
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


def declare_inductive(env: GlobalEnv, decl: InductiveDecl) -> GlobalEnv:
    """Check and add an inductive; its eliminators become available for every
    permitted target sort."""
    _check_positivity(decl)
    new_env = env.with_inductive(decl)
    ctx = Context()
    for pname, pty in decl.params:
        infer_sort(new_env, ctx, pty)
        ctx = ctx.push(pname, pty)
    for ctor in decl.ctors:
        cctx = ctx
        for a, (aname, aty) in enumerate(ctor.args):
            s = infer_sort(new_env, cctx, aty)
            if decl.sort != PROP and not sort_le(s, decl.sort):
                raise IllTyped(
                    f"constructor argument {aname!r} of {ctor.name} lives in "
                    f"{s!r}, above the inductive's sort {decl.sort!r}")
            cctx = cctx.push(aname, aty)
    return new_env


def declare_definition(env: GlobalEnv, name: str, ty: Term, body: Term,
                       opaque_for_repair: bool = False) -> GlobalEnv:
    infer_sort(env, Context(), ty)
    check_type(env, Context(), body, ty)
    return env.with_definition(Definition(name, ty, body, opaque_for_repair))
