"""Automatic generation of properness proofs.

Two strategies, tried in order: an eliminator strategy for bodies headed by
an eliminator with a constant motive (native recursors get a properness
schema synthesized by induction; configured recursors use their registered
instance), and a rewrite strategy that introduces the pairwise hypotheses,
rewrites the conclusion by each one (tolerating failures), and closes by
reflexivity. Failure is a value; a returned instance always re-checks.
"""
from __future__ import annotations

from dataclasses import dataclass

from .kernel import (
    App, ConstRef, Context, CtorRef, ElimRef, GlobalEnv, IllTyped, IndRef,
    Lam, Pi, Term, Var, PROP, check_type, contains, conv, lift, mk_app,
    mk_lam_telescope, mk_pi_telescope, replace, spine, subst, whnf,
)
from .kernel.terms import occurs_var
from .rewriting import RewriteError, implication_by_relation, rel_refl_proof, rel_sym_proof
from .setoids import (
    ProperInstance, Registry, lookup_relation, match_subject, mk_respectful,
    proper_statement, relation_carrier,
)

MAX_DEPTH = 8


@dataclass(frozen=True)
class Hyp:
    rel: Term
    a: Term
    b: Term
    proof: Term


def _lift_hyps(hyps: list[Hyp], n: int) -> list[Hyp]:
    return [Hyp(lift(h.rel, n), lift(h.a, n), lift(h.b, n), lift(h.proof, n))
            for h in hyps]


def split_rel_app(t: Term) -> tuple[Term, Term, Term] | None:
    head, args = spine(t)
    if head == IndRef("eq") and len(args) == 3:
        return App(head, args[0]), args[1], args[2]
    if len(args) >= 2:
        rel = mk_app(head, *args[:-2]) if len(args) > 2 else head
        return rel, args[-2], args[-1]
    return None


def _is_raw_eq(rel: Term) -> Term | None:
    head, args = spine(rel)
    if head == IndRef("eq") and len(args) == 1:
        return args[0]
    return None


def unfolded_statement(env: GlobalEnv, f: Term, signature: list[Term]) -> Term:
    """forall x1 y1, R1 x1 y1 -> ... -> Rn (f x...) (f y...)."""
    binders: list[tuple[str, Term]] = []
    xs: list[int] = []
    ys: list[int] = []
    depth = 0
    for i, rel in enumerate(signature[:-1]):
        carrier = relation_carrier(env, rel)
        binders.append((f"x{i}", lift(carrier, depth)))
        xs.append(depth)
        depth += 1
        binders.append((f"y{i}", lift(carrier, depth)))
        ys.append(depth)
        depth += 1
        binders.append((f"h{i}", mk_app(lift(rel, depth),
                                        Var(depth - 1 - xs[i]),
                                        Var(depth - 1 - ys[i]))))
        depth += 1
    fa = mk_app(lift(f, depth), *[Var(depth - 1 - p) for p in xs])
    fb = mk_app(lift(f, depth), *[Var(depth - 1 - p) for p in ys])
    concl = mk_app(lift(signature[-1], depth), fa, fb)
    return mk_pi_telescope(binders, concl)


def _unfold_const_app(env: GlobalEnv, t: Term) -> Term:
    """Unfold a constant at the head and beta-reduce; one layer only."""
    head, args = spine(t)
    if isinstance(head, ConstRef):
        d = env.definition(head.name)
        if d is not None:
            body = d.body
            while isinstance(body, Lam) and args:
                body = subst(body.body, args[0])
                args = args[1:]
            return mk_app(body, *args)
    return t


def _instantiated_ctor_args(decl, j: int, params: list[Term]) -> list[tuple[str, Term, bool]] | None:
    """Closed, param-instantiated argument types of constructor j, or None if
    any argument type depends on an earlier argument."""
    ctor = decl.ctors[j]
    recpos = decl.recursive_positions(ctor)
    out = []
    for i, (aname, aty) in enumerate(ctor.args):
        t = aty
        for p in reversed(params):
            t = subst(t, p, i)
        if any(occurs_var(t, m) for m in range(i)):
            return None
        out.append((aname, t, recpos[i]))
    return out


class Prover:
    """Bounded recursive search for proofs of relational goals."""

    def __init__(self, env: GlobalEnv, registry: Registry):
        self.env = env
        self.registry = registry

    def prove(self, ctx: Context, hyps: list[Hyp], goal: Term, depth: int) -> Term | None:
        if depth > MAX_DEPTH:
            return None
        if isinstance(goal, Pi):
            inner = _lift_hyps(hyps, 1)
            parsed = split_rel_app(goal.domain)
            if parsed is not None:
                inner = inner + [Hyp(lift(parsed[0], 1), lift(parsed[1], 1),
                                     lift(parsed[2], 1), Var(0))]
            sub = self.prove(ctx.push(goal.name, goal.domain), inner,
                             goal.codomain, depth)
            if sub is None:
                return None
            return Lam(goal.name, goal.domain, sub)
        parsed = split_rel_app(goal)
        if parsed is None:
            return None
        rel, a, b = parsed
        return self.prove_rel(ctx, hyps, rel, a, b, depth)

    def prove_rel(self, ctx: Context, hyps: list[Hyp], rel: Term,
                  a: Term, b: Term, depth: int) -> Term | None:
        if depth > MAX_DEPTH:
            return None
        env, reg = self.env, self.registry
        from .rewriting import whnf_beta
        a = whnf_beta(a)
        b = whnf_beta(b)
        if conv(env, ctx, a, b):
            pf = rel_refl_proof(env, reg, rel, a)
            if pf is not None:
                return pf
        for h in hyps:
            if h.rel == rel or conv(env, ctx, h.rel, rel):
                if conv(env, ctx, h.a, a) and conv(env, ctx, h.b, b):
                    return h.proof
                if conv(env, ctx, h.a, b) and conv(env, ctx, h.b, a):
                    pf = rel_sym_proof(env, reg, rel, h.a, h.b, h.proof)
                    if pf is not None:
                        return pf
        pf = self._decompose(ctx, hyps, rel, a, b, depth)
        if pf is not None:
            return pf
        goal_app = mk_app(rel, a, b)
        for i, h in enumerate(hyps):
            t_eq = _is_raw_eq(h.rel)
            if t_eq is None or not contains(goal_app, h.a) or conv(env, ctx, h.a, h.b):
                continue
            new_goal = replace(goal_app, h.a, h.b)
            parsed = split_rel_app(new_goal)
            if parsed is None:
                continue
            rest = hyps[:i] + hyps[i + 1:]
            sub = self.prove_rel(ctx, rest, parsed[0], parsed[1], parsed[2],
                                 depth + 1)
            if sub is None:
                continue
            sym = mk_app(ConstRef("eq_sym"), t_eq, h.a, h.b, h.proof)
            motive = Lam("w", t_eq, replace(lift(goal_app, 1), lift(h.a, 1), Var(0)))
            return mk_app(ElimRef("eq", PROP), t_eq, h.b, motive, sub, h.a, sym)
        unfolded = whnf(env, ctx, mk_app(rel, a, b))
        if isinstance(unfolded, Pi):
            return self.prove(ctx, hyps, unfolded, depth + 1)
        return None

    def _decompose(self, ctx: Context, hyps: list[Hyp], rel: Term,
                   a: Term, b: Term, depth: int) -> Term | None:
        env = self.env
        ha, argsa = spine(a)
        hb, argsb = spine(b)
        if ha != hb or len(argsa) != len(argsb):
            return None
        for inst, rest_a in self._candidates(ctx, ha, argsa, rel):
            if not conv(env, ctx, inst.signature[-1], rel):
                continue
            split = len(argsa) - len(rest_a)
            rest_b = argsb[split:]
            if any(not conv(env, ctx, pa, pb)
                   for pa, pb in zip(argsa[:split], argsb[:split])):
                continue
            proof = inst.proof
            ok = True
            for ra, rb, r in zip(rest_a, rest_b, inst.signature[:-1]):
                sub = self.prove_rel(ctx, hyps, r, ra, rb, depth + 1)
                if sub is None:
                    ok = False
                    break
                proof = mk_app(proof, ra, rb, sub)
            if ok:
                return proof
        return None

    def _candidates(self, ctx: Context, head: Term, args: list[Term], rel: Term):
        env, reg = self.env, self.registry
        for inst in reg.newest_first():
            rest = match_subject(env, ctx, inst, head, args)
            if rest is not None:
                yield inst, rest
        if head == IndRef("eq") and len(args) == 3:
            from .setoids import eq_iff_instance
            yield eq_iff_instance(env, args[0]), args[1:]
        if isinstance(head, ElimRef) and head.ind != "eq":
            got = self._synth_elim_instance(ctx, head, args, rel)
            if got is not None:
                yield got

    # -- synthesized properness of a native constant-motive eliminator -------
    def _synth_elim_instance(self, ctx: Context, head: ElimRef,
                             args: list[Term], rel: Term):
        env = self.env
        decl = env.inductive(head.ind)
        k = decl.n_params
        n = len(decl.ctors)
        if len(args) != k + 1 + n + 1:
            return None
        params = args[:k]
        motive = whnf(env, ctx, args[k])
        if not (isinstance(motive, Lam) and not occurs_var(motive.body, 0)):
            return None
        c_ty = subst(motive.body, PROP, 0)
        r_c = rel  # results are compared by the relation required at this node
        ind_applied = mk_app(IndRef(head.ind), *params)
        chains: list[list[Term]] = []
        for j in range(n):
            tele = _instantiated_ctor_args(decl, j, params)
            if tele is None:
                return None
            chain: list[Term] = []
            for (_, t, is_rec) in tele:
                chain.append(App(IndRef("eq"), t))
                if is_rec:
                    chain.append(r_c)
            chain.append(r_c)
            chains.append(chain)
        subject = mk_app(head, *params, args[k])
        try:
            proof = self._elim_proper_proof(head, decl, params, args[k],
                                            c_ty, r_c, chains)
            sig = [c[0] if len(c) == 1 else mk_respectful(env, c) for c in chains]
            sig += [App(IndRef("eq"), ind_applied), r_c]
            check_type(env, ctx, proof, proper_statement(env, subject, sig))
        except (IllTyped, RewriteError):
            return None
        return ProperInstance(subject, tuple(sig), proof), args[k + 1:]

    def _elim_proper_proof(self, head: ElimRef, decl, params: list[Term],
                           motive: Term, c_ty: Term, r_c: Term,
                           chains: list[list[Term]]) -> Term:
        env = self.env
        n = len(decl.ctors)
        ind_applied = mk_app(IndRef(head.ind), *params)

        binders: list[tuple[str, Term]] = []
        f_abs: list[int] = []
        g_abs: list[int] = []
        h_abs: list[int] = []
        depth = 0
        for j in range(n):
            mty = self._method_type(decl, j, params, c_ty)
            binders.append((f"f{j}", lift(mty, depth)))
            f_abs.append(depth)
            depth += 1
            binders.append((f"g{j}", lift(mty, depth)))
            g_abs.append(depth)
            depth += 1
            chain = chains[j]
            relj = chain[0] if len(chain) == 1 else mk_respectful(env, chain)
            binders.append((f"H{j}", mk_app(lift(relj, depth),
                                            Var(depth - 1 - f_abs[j]),
                                            Var(depth - 1 - g_abs[j]))))
            h_abs.append(depth)
            depth += 1
        x_abs = depth
        binders.append(("x", lift(ind_applied, depth)))
        depth += 1
        y_abs = depth
        binders.append(("y", lift(ind_applied, depth)))
        depth += 1
        e_abs = depth
        binders.append(("e", mk_app(IndRef("eq"), lift(ind_applied, depth),
                                    Var(depth - 1 - x_abs), Var(depth - 1 - y_abs))))
        depth += 1

        def v(abs_pos: int, d: int) -> Term:
            return Var(d - 1 - abs_pos)

        def elim_with(ms: list[int], target: Term, d: int) -> Term:
            return mk_app(head, *[lift(p, d) for p in params], lift(motive, d),
                          *[v(m, d) for m in ms], target)

        imot = Lam("w", lift(ind_applied, depth),
                   mk_app(lift(r_c, depth + 1),
                          elim_with(f_abs, Var(0), depth + 1),
                          elim_with(g_abs, Var(0), depth + 1)))
        imethods: list[Term] = []
        for j in range(n):
            tele = _instantiated_ctor_args(decl, j, params)
            assert tele is not None
            mbinders: list[tuple[str, Term]] = []
            arg_abs: list[int] = []
            ih_abs: dict[int, int] = {}
            d2 = depth
            for i, (aname, t, is_rec) in enumerate(tele):
                mbinders.append((aname, lift(t, d2)))
                arg_abs.append(d2)
                d2 += 1
                if is_rec:
                    mbinders.append((aname + "_ih",
                                     mk_app(lift(r_c, d2),
                                            elim_with(f_abs, v(arg_abs[-1], d2), d2),
                                            elim_with(g_abs, v(arg_abs[-1], d2), d2))))
                    ih_abs[i] = d2
                    d2 += 1
            call: Term = v(h_abs[j], d2)
            for i, (aname, t, is_rec) in enumerate(tele):
                av = v(arg_abs[i], d2)
                call = mk_app(call, av, av, mk_app(CtorRef("eq", 0), lift(t, d2), av))
                if is_rec:
                    call = mk_app(call, elim_with(f_abs, av, d2),
                                  elim_with(g_abs, av, d2), v(ih_abs[i], d2))
            imethods.append(mk_lam_telescope(mbinders, call))

        induction = mk_app(ElimRef(head.ind, PROP),
                           *[lift(p, depth) for p in params], imot,
                           *imethods, v(x_abs, depth))
        tr_motive = Lam("w", lift(ind_applied, depth),
                        mk_app(lift(r_c, depth + 1),
                               elim_with(f_abs, v(x_abs, depth + 1), depth + 1),
                               elim_with(g_abs, Var(0), depth + 1)))
        body = mk_app(ElimRef("eq", PROP), lift(ind_applied, depth),
                      v(x_abs, depth), tr_motive, induction,
                      v(y_abs, depth), v(e_abs, depth))
        return mk_lam_telescope(binders, body)

    def _method_type(self, decl, j: int, params: list[Term], c_ty: Term) -> Term:
        tele = _instantiated_ctor_args(decl, j, params)
        assert tele is not None
        binders = []
        d = 0
        for (aname, t, is_rec) in tele:
            binders.append((aname, lift(t, d)))
            d += 1
            if is_rec:
                binders.append((aname + "_ih", lift(c_ty, d)))
                d += 1
        return mk_pi_telescope(binders, lift(c_ty, d))


def _intro_all(goal_stmt: Term):
    ctx = Context()
    hyps: list[Hyp] = []
    binders: list[tuple[str, Term]] = []
    goal = goal_stmt
    while isinstance(goal, Pi):
        binders.append((goal.name, goal.domain))
        hyps = _lift_hyps(hyps, 1)
        parsed = split_rel_app(goal.domain)
        if parsed is not None:
            hyps.append(Hyp(lift(parsed[0], 1), lift(parsed[1], 1),
                            lift(parsed[2], 1), Var(0)))
        ctx = ctx.push(goal.name, goal.domain)
        goal = goal.codomain
    return ctx, hyps, binders, goal


def strategy_rewrite(env: GlobalEnv, registry: Registry, goal_stmt: Term) -> Term | None:
    """Intro the related hypotheses, rewrite the conclusion by each of them
    (failures tolerated), close by the reflexivity witness."""
    ctx, hyps, binders, goal = _intro_all(goal_stmt)
    parsed = split_rel_app(goal)
    if parsed is None:
        return None
    rel, a, b = parsed
    work = mk_app(rel, _unfold_const_app(env, a), _unfold_const_app(env, b))
    wrappers: list[Term] = []
    for h in hyps:
        if not contains(work, h.a) or conv(env, ctx, h.a, h.b):
            continue
        try:
            impl_back = implication_by_relation(env, ctx, registry, h.rel,
                                                h.a, h.b, h.proof, work,
                                                direction=1)
        except RewriteError:
            continue
        wrappers.append(impl_back)
        work = replace(work, h.a, h.b)
    parsed2 = split_rel_app(work)
    if parsed2 is None:
        return None
    rel2, a2, b2 = parsed2
    if not conv(env, ctx, a2, b2):
        return None
    proof = rel_refl_proof(env, registry, rel2, a2)
    if proof is None:
        return None
    for w in reversed(wrappers):
        proof = App(w, proof)
    return mk_lam_telescope(binders, proof)


def strategy_eliminator(env: GlobalEnv, registry: Registry, goal_stmt: Term) -> Term | None:
    """Close a properness statement whose subject unfolds to an eliminator
    application with a constant motive."""
    ctx, hyps, binders, goal = _intro_all(goal_stmt)
    parsed = split_rel_app(goal)
    if parsed is None:
        return None
    rel, a, b = parsed
    a2 = _unfold_const_app(env, a)
    b2 = _unfold_const_app(env, b)
    head, hargs = spine(a2)
    if isinstance(head, ElimRef):
        if head.ind == "eq":
            return None
        decl = env.inductive(head.ind)
        if len(hargs) <= decl.n_params:
            return None
        motive = whnf(env, ctx, hargs[decl.n_params])
        if not (isinstance(motive, Lam) and not occurs_var(motive.body, 0)):
            return None  # non-constant motive: immediate failure
    elif isinstance(head, ConstRef):
        if not any(match_subject(env, ctx, inst, head, hargs) is not None
                   for inst in registry.newest_first()):
            return None
    else:
        return None
    prover = Prover(env, registry)
    sub = prover.prove_rel(ctx, hyps, rel, a2, b2, 0)
    if sub is None:
        return None
    return mk_lam_telescope(binders, sub)


def generate_proper(env: GlobalEnv, registry: Registry, f: Term,
                    signature: list[Term]) -> ProperInstance | None:
    """Try the eliminator strategy, then the rewrite strategy; a returned
    instance always re-checks at its statement."""
    stmt = unfolded_statement(env, f, signature)
    for strat in (strategy_eliminator, strategy_rewrite):
        try:
            proof = strat(env, registry, stmt)
        except (RewriteError, IllTyped):
            proof = None
        if proof is None:
            continue
        try:
            check_type(env, Context(), proof,
                       proper_statement(env, f, list(signature)))
        except IllTyped:
            continue
        return ProperInstance(f, tuple(signature), proof)
    return None
