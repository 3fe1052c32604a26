"""The rewrite oracle: instance-driven congruence proofs.

Given a proof that two elements of a setoid are related, the oracle builds a
proof transforming a goal into the goal with every occurrence of the left
element replaced by the right one. Search is deterministic: leftmost-outermost
decomposition, instances tried most-recently-registered first, no axioms.
"""
from __future__ import annotations

from dataclasses import dataclass

from .kernel import (
    App, ConstRef, Context, CtorRef, ElimRef, GlobalEnv, IllTyped, IndRef,
    Lam, Pi, Sort, Term, Var, PROP, check_type, contains, conv, infer_type,
    lift, mk_app, replace, spine, whnf,
)
from .setoids import (
    ProperInstance, Registry, SetoidSpec, eq_iff_instance, lookup_by_relation,
    lookup_relation, match_subject,
)


class RewriteError(Exception):
    pass


class NoProperInstance(RewriteError):
    def __init__(self, head: Term):
        self.head = head
        super().__init__(f"no properness instance covers {head!r}")


class NoOccurrence(RewriteError):
    pass


class MotiveMismatch(RewriteError):
    pass


@dataclass(frozen=True)
class RewriteRequest:
    env: GlobalEnv
    ctx: Context
    registry: Registry
    carrier: Term
    lhs: Term
    rhs: Term
    eq_proof: Term
    goal: Term
    subject: Term | None = None
    motive: Term | None = None


def _is_raw_eq(rel: Term) -> Term | None:
    """If rel is (eq T), return T."""
    head, args = spine(rel)
    if head == IndRef("eq") and len(args) == 1:
        return args[0]
    return None


def rel_refl_proof(env: GlobalEnv, registry: Registry, rel: Term, t: Term) -> Term | None:
    """A proof of rel t t, from the canonical reflexivity witness."""
    eq_t = _is_raw_eq(rel)
    if eq_t is not None:
        return mk_app(CtorRef("eq", 0), eq_t, t)
    spec = lookup_by_relation(env, registry, rel)
    if spec is not None:
        return mk_app(spec.refl, t)
    return None


def rel_sym_proof(env: GlobalEnv, registry: Registry, rel: Term,
                  a: Term, b: Term, proof: Term) -> Term | None:
    eq_t = _is_raw_eq(rel)
    if eq_t is not None:
        return mk_app(ConstRef("eq_sym"), eq_t, a, b, proof)
    spec = lookup_by_relation(env, registry, rel)
    if spec is not None:
        return mk_app(spec.sym, a, b, proof)
    return None


def _candidate_instances(env: GlobalEnv, ctx: Context, registry: Registry,
                         head: Term, args: list[Term]):
    for inst in registry.newest_first():
        rest = match_subject(env, ctx, inst, head, args)
        if rest is not None:
            yield inst, rest
    # default setoids respect themselves into iff without registration
    if head == IndRef("eq") and len(args) == 3:
        inst = eq_iff_instance(env, args[0])
        yield inst, args[1:]


def _cong(env: GlobalEnv, ctx: Context, registry: Registry,
          expected_rel: Term, t: Term,
          lhs: Term, rhs: Term, eq_proof: Term, rel: Term) -> Term:
    """Proof of expected_rel t t' where t' = t[lhs := rhs] (all occurrences)."""
    if t == lhs:
        if expected_rel == rel or conv(env, ctx, expected_rel, rel):
            return eq_proof
        raise NoProperInstance(t)
    if not contains(t, lhs):
        pf = rel_refl_proof(env, registry, expected_rel, t)
        if pf is None:
            raise NoProperInstance(expected_rel)
        return pf
    if isinstance(t, (Lam, Pi)):
        raise NoProperInstance(t)  # no rewriting under binders
    head, args = spine(t)
    if contains(head, lhs) and head != lhs:
        raise NoProperInstance(head)
    for inst, rest in _candidate_instances(env, ctx, registry, head, args):
        out_rel = inst.signature[-1]
        if not (out_rel == expected_rel or conv(env, ctx, out_rel, expected_rel)):
            continue
        prefix_len = len(args) - len(rest)
        if any(contains(a, lhs) for a in args[:prefix_len]):
            continue
        try:
            proof = inst.proof
            for a, r in zip(rest, inst.signature[:-1]):
                a2 = replace(a, lhs, rhs)
                proof = mk_app(proof, a, a2, _cong(env, ctx, registry, r, a,
                                                   lhs, rhs, eq_proof, rel))
            return proof
        except RewriteError:
            continue
    raise NoProperInstance(head)


def congruence_iff(env: GlobalEnv, ctx: Context, registry: Registry,
                   carrier: Term, lhs: Term, rhs: Term, eq_proof: Term,
                   goal: Term) -> Term:
    """Proof of iff goal goal' where goal' replaces every lhs by rhs."""
    if not contains(goal, lhs):
        raise NoOccurrence(f"{lhs!r} does not occur in the goal")
    spec = lookup_relation(env, registry, carrier)
    return _cong(env, ctx, registry, ConstRef("iff"), goal,
                 lhs, rhs, eq_proof, spec.relation)


def _impl_from_iff(which: int, iff_proof: Term, a: Term, b: Term) -> Term:
    """Project one direction out of an iff proof (0: a->b, 1: b->a)."""
    proj = ConstRef("proj1") if which == 0 else ConstRef("proj2")
    return mk_app(proj, Pi("_", a, lift(b, 1)), Pi("_", b, lift(a, 1)), iff_proof)


def _transport_impl(env: GlobalEnv, ctx: Context, carrier: Term,
                    lhs: Term, rhs: Term, eq_proof: Term, goal: Term) -> Term:
    """goal -> goal[lhs:=rhs] for a raw equality rewrite, via transport."""
    sort = whnf(env, ctx, infer_type(env, ctx, goal))
    if not isinstance(sort, Sort):
        raise MotiveMismatch("goal is not a type")
    elim = ElimRef("eq", sort)
    body = mk_app(elim, lift(carrier, 1), lift(lhs, 1),
                  Lam("w", lift(carrier, 1),
                      replace(lift(goal, 2), lift(lhs, 2), Var(0))),
                  Var(0), lift(rhs, 1), lift(eq_proof, 1))
    return Lam("h", goal, body)


def implication_by_relation(env: GlobalEnv, ctx: Context, registry: Registry,
                            relation: Term, lhs: Term, rhs: Term,
                            eq_proof: Term, goal: Term,
                            direction: int = 0) -> Term:
    """Like implication, but the relation is given instead of looked up."""
    if not contains(goal, lhs):
        raise NoOccurrence(f"{lhs!r} does not occur in the goal")
    raw = _is_raw_eq(relation)
    if raw is not None:
        if direction == 1:
            # transport the abstracted goal backwards along the symmetric proof
            sort = whnf(env, ctx, infer_type(env, ctx, goal))
            if not isinstance(sort, Sort):
                raise MotiveMismatch("goal is not a type")
            sym = rel_sym_proof(env, registry, relation, lhs, rhs, eq_proof)
            goal2 = replace(goal, lhs, rhs)
            body = mk_app(ElimRef("eq", sort), lift(raw, 1), lift(rhs, 1),
                          Lam("w", lift(raw, 1),
                              replace(lift(goal, 2), lift(lhs, 2), Var(0))),
                          Var(0), lift(lhs, 1), lift(sym, 1))
            return Lam("h", goal2, body)
        return _transport_impl(env, ctx, raw, lhs, rhs, eq_proof, goal)
    iff_proof = _cong(env, ctx, registry, ConstRef("iff"), goal,
                      lhs, rhs, eq_proof, relation)
    goal2 = replace(goal, lhs, rhs)
    return _impl_from_iff(direction, iff_proof, goal, goal2)


def implication(env: GlobalEnv, ctx: Context, registry: Registry,
                carrier: Term, lhs: Term, rhs: Term, eq_proof: Term,
                goal: Term, direction: int = 0) -> Term:
    """Proof of goal -> goal' (direction 0) or goal' -> goal (direction 1)."""
    spec = lookup_relation(env, registry, carrier)
    return implication_by_relation(env, ctx, registry, spec.relation,
                                   lhs, rhs, eq_proof, goal, direction)


def congruence_search(req: RewriteRequest) -> Term:
    """Proof of the implication from req.goal to its fully rewritten form."""
    return implication(req.env, req.ctx, req.registry, req.carrier,
                       req.lhs, req.rhs, req.eq_proof, req.goal, direction=0)


def lift_setoid_rewrite(env: GlobalEnv, ctx: Context, registry: Registry,
                        carrier: Term, lhs: Term, rhs: Term, eq_proof: Term,
                        goal: Term, subject: Term) -> Term:
    """Rewrite every occurrence of lhs in the type of subject; re-checked."""
    impl = implication(env, ctx, registry, carrier, lhs, rhs, eq_proof, goal)
    out = App(impl, subject)
    expected = replace(goal, lhs, rhs)
    got = infer_type(env, ctx, out)
    if not conv(env, ctx, got, expected):
        raise IllTyped(f"oracle output checks at {got!r}, not {expected!r}")
    return out


def _abstract_occ(t: Term, needle: Term, base: int, var0: int, depth: int = 0) -> Term:
    """Replace occurrences of lift(needle, base+depth) with Var(var0+depth)."""
    if t == lift(needle, base + depth):
        return Var(var0 + depth)
    match t:
        case App(f, a):
            return App(_abstract_occ(f, needle, base, var0, depth),
                       _abstract_occ(a, needle, base, var0, depth))
        case Lam(x, d, b):
            return Lam(x, _abstract_occ(d, needle, base, var0, depth),
                       _abstract_occ(b, needle, base, var0, depth + 1))
        case Pi(x, d, b):
            return Pi(x, _abstract_occ(d, needle, base, var0, depth),
                      _abstract_occ(b, needle, base, var0, depth + 1))
        case _:
            return t


def lift_rewrite(env: GlobalEnv, ctx: Context, registry: Registry,
                 carrier: Term, x: Term, motive: Term, subject: Term,
                 y: Term, eq_proof: Term, reverse: bool = False) -> Term:
    """Realize a motive-directed rewrite: from subject : motive x, build a
    term of type motive y.

    The motive's own occurrences of x are first generalized to a fresh
    variable so that only the motive holes are rewritten; the congruence
    implication is found for the generalized goal and then specialized.
    In the reverse orientation eq_proof relates y to x instead.
    """
    spec = lookup_relation(env, registry, carrier)
    if reverse:
        flipped = rel_sym_proof(env, registry, spec.relation, y, x, eq_proof)
        if flipped is None:
            raise NoProperInstance(spec.relation)
        eq_proof = flipped

    p = whnf(env, ctx, motive)
    if not isinstance(p, Lam):
        p = Lam("w", carrier, App(lift(motive, 1), Var(0)))
    # motive body sits under one binder; make room for the generalization
    # variable z between the context and the hole binder
    body1 = lift(p.body, 1, 1)          # [z, hole] with ctx refs shifted
    body2 = _abstract_occ(body1, x, 2, 1)
    ctx_z = ctx.push("z", carrier)
    goal_z = App(Lam(p.name, lift(p.domain, 1), body2), lift(x, 1))
    goal_z = whnf_beta(goal_z)
    impl_z = implication(env, ctx_z, registry, lift(carrier, 1), lift(x, 1),
                         lift(y, 1), lift(eq_proof, 1), goal_z)
    from .kernel import subst
    impl = subst(impl_z, x, 0)
    out = App(impl, subject)
    expected = whnf_beta(App(motive, y))
    got = infer_type(env, ctx, out)
    if not conv(env, ctx, got, expected):
        raise IllTyped(f"rewrite output checks at {got!r}, not {expected!r}")
    return out


def whnf_beta(t: Term) -> Term:
    """Contract head beta redexes only."""
    from .kernel import subst
    while True:
        head, args = spine(t)
        if isinstance(head, Lam) and args:
            t = mk_app(subst(head.body, args[0]), *args[1:])
            continue
        return t
