"""The repair transformation: map annotated terms over the source carrier to
terms over the target carrier, with no residual source reference.

Rule order at each node: annotation markers and equality-eliminator forms
first, then configuration components, then structural recursion. Constants
pass through when they cannot mention the configuration (implicit opacity),
are listed opaque, or have already been repaired; anything else is a missing
dependency.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .config import Configuration
from .kernel import (
    App, ConstRef, Context, CtorRef, ElimRef, GlobalEnv, IllTyped, IndRef,
    Lam, Pi, Sort, Term, Var, PROP, check_type, conv, infer_type, lift,
    mk_app, pi_telescope, spine, whnf,
)
from .rewriting import lift_rewrite, lift_setoid_rewrite
from .setoids import Registry, lookup_relation

START_REWRITE = "START_REWRITE"


class ImproperAnnotation(Exception):
    pass


class MissingDependency(Exception):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"constant {name!r} is not repaired, opaque, or configuration-free")


@dataclass
class RepairSession:
    cfg: Configuration
    src_env: GlobalEnv
    tgt_env: GlobalEnv
    registry: Registry
    cache: dict = field(default_factory=dict)
    generated_instances: list = field(default_factory=list)

    def __post_init__(self):
        self._pairs: list[tuple[Term, Term]] = []
        a, b = self.cfg.side_a, self.cfg.side_b
        self._pairs.append((a.carrier, b.carrier))
        if not a.setoid.is_default or not b.setoid.is_default:
            if not a.setoid.is_default:
                self._pairs.append((a.setoid.relation, b.setoid.relation))
                self._pairs.append((a.setoid.refl, b.setoid.refl))
                self._pairs.append((a.setoid.sym, b.setoid.sym))
                self._pairs.append((a.setoid.trans, b.setoid.trans))
        self._pairs.extend(zip(a.dep_constr, b.dep_constr))
        self._pairs.append((a.dep_rec, b.dep_rec))
        if a.dep_elim_prop is not None and b.dep_elim_prop is not None:
            self._pairs.append((a.dep_elim_prop, b.dep_elim_prop))
        self._pairs.extend(zip(a.iota_fwd, b.iota_fwd))
        self._pairs.extend(zip(a.iota_rev, b.iota_rev))
        for (ma, aa), (mb, ab) in zip(a.applied_elim_pairs, b.applied_elim_pairs):
            self._pairs.append((ma, mb))
            self._pairs.append((aa, ab))
        self._trigger_names: set[str] = set()
        self._trigger_inds: set[str] = set()
        for s, t in self._pairs:
            if s == t:
                continue
            self._note_trigger(s)
        self._carrier_changes = a.carrier != b.carrier
        self._setoid_change = not b.setoid.is_default
        self._config_free: dict[str, bool] = {}

    def _note_trigger(self, t: Term):
        head, _ = spine(t)
        match head:
            case ConstRef(n):
                self._trigger_names.add(n)
            case IndRef(n) | CtorRef(n, _) | ElimRef(n, _):
                self._trigger_inds.add(n)
            case _:
                pass

    # -- configuration-footprint analysis ------------------------------------
    def _term_touches(self, t: Term) -> set[str]:
        """Constant names referenced by t; raises if t hits a trigger head."""
        consts: set[str] = set()

        def go(u: Term):
            match u:
                case ConstRef(n):
                    consts.add(n)
                case IndRef(n) | CtorRef(n, _) | ElimRef(n, _):
                    if n in self._trigger_inds:
                        raise _Touches()
                case App(f, a):
                    go(f)
                    go(a)
                case Lam(_, d, b) | Pi(_, d, b):
                    go(d)
                    go(b)
                case _:
                    pass

        go(t)
        return consts

    def is_config_free(self, name: str) -> bool:
        if name in self._config_free:
            return self._config_free[name]
        if name in self._trigger_names:
            self._config_free[name] = False
            return False
        d = self.src_env.definition(name)
        if d is None:
            self._config_free[name] = True  # an inductive; trigger check is separate
            return True
        self._config_free[name] = True  # provisional, env is acyclic
        try:
            refs = self._term_touches(d.type) | self._term_touches(d.body)
        except _Touches:
            self._config_free[name] = False
            return False
        ok = all(r in self._trigger_names or self.is_config_free(r)
                 for r in refs) and not (refs & self._trigger_names)
        self._config_free[name] = ok
        return ok


class _Touches(Exception):
    pass


def _eq_spine_kind(head: Term) -> str | None:
    match head:
        case IndRef("eq"):
            return "eq"
        case CtorRef("eq", 0):
            return "refl"
        case ElimRef("eq", _):
            return "elim"
        case ConstRef("eq_ind_r"):
            return "elim_rev"
    return None


def repair_term(session: RepairSession, ctx: Context, t: Term,
                recheck: bool = True) -> Term:
    infer_annotations(session, t)
    out = _repair(session, ctx, t)
    if recheck:
        ctx2 = repair_env(session, ctx)
        infer_type(session.tgt_env, ctx2, out)
    return out


def repair_env(session: RepairSession, ctx: Context) -> Context:
    out = Context()
    prefix = Context()
    for (name, ty, body) in ctx.entries:
        ty2 = _repair(session, prefix, ty)
        body2 = _repair(session, prefix, body) if body is not None else None
        out = out.push(name, ty2, body2)
        prefix = prefix.push(name, ty, body)
    return out


def _relation_of_marker(session: RepairSession, E: Term) -> tuple[Term, Term, Term]:
    """Split a marker's relation application into (carrier, x, y)."""
    head, args = spine(E)
    a = session.cfg.side_a
    if not a.setoid.is_default and head == a.setoid.relation and len(args) == 2:
        return a.carrier, args[0], args[1]
    if head == IndRef("eq") and len(args) == 3:
        return args[0], args[1], args[2]
    # a registered relation other than the carrier's own
    rel_app = E
    h2, args2 = spine(rel_app)
    if len(args2) >= 2:
        rel = mk_app(h2, *args2[:-2]) if len(args2) > 2 else h2
        from .setoids import lookup_by_relation
        spec = lookup_by_relation(session.src_env, session.registry, rel)
        if spec is not None:
            return spec.carrier, args2[-2], args2[-1]
    raise ImproperAnnotation(f"cannot read a rewrite relation from {E!r}")


def _repair(session: RepairSession, ctx: Context, t: Term) -> Term:
    s = session
    head, args = spine(t)

    # annotation markers
    if head == ConstRef(START_REWRITE):
        if len(args) != 6:
            raise ImproperAnnotation("partially applied START_REWRITE marker")
        E, e, G, subj, _R, _r = args
        carrier, x, y = _relation_of_marker(s, E)
        b = _repair(s, ctx, carrier)
        x2 = _repair(s, ctx, x)
        y2 = _repair(s, ctx, y)
        e2 = _repair(s, ctx, e)
        g2 = _repair(s, ctx, G)
        t2 = _repair(s, ctx, subj)
        ctx2 = repair_env(s, ctx)
        return lift_setoid_rewrite(s.tgt_env, ctx2, s.registry,
                                   b, x2, y2, e2, g2, t2)

    kind = _eq_spine_kind(head)
    if kind in ("elim", "elim_rev") and len(args) >= 6:
        A, x, P, f, y, e = args[:6]
        a2 = _repair(s, ctx, A)
        spec2 = lookup_relation(s.tgt_env, s.registry, a2)
        if not spec2.is_default:
            x2 = _repair(s, ctx, x)
            p2 = _repair(s, ctx, P)
            f2 = _repair(s, ctx, f)
            y2 = _repair(s, ctx, y)
            e2 = _repair(s, ctx, e)
            ctx2 = repair_env(s, ctx)
            out = lift_rewrite(s.tgt_env, ctx2, s.registry, a2, x2, p2, f2,
                               y2, e2, reverse=(kind == "elim_rev"))
            return mk_app(out, *[_repair(s, ctx, x) for x in args[6:]])
    elif kind == "eq" and args:
        a2 = _repair(s, ctx, args[0])
        spec2 = lookup_relation(s.tgt_env, s.registry, a2)
        if not spec2.is_default:
            if len(args) != 3:
                raise ImproperAnnotation(
                    f"partially applied equality over {args[0]!r}")
            return mk_app(spec2.relation, _repair(s, ctx, args[1]),
                          _repair(s, ctx, args[2]))
    elif kind == "refl" and args:
        a2 = _repair(s, ctx, args[0])
        spec2 = lookup_relation(s.tgt_env, s.registry, a2)
        if not spec2.is_default:
            if len(args) != 2:
                raise ImproperAnnotation(
                    f"partially applied reflexivity over {args[0]!r}")
            return mk_app(spec2.refl, _repair(s, ctx, args[1]))

    # configuration components, matched at the application head
    for src, tgt in s._pairs:
        if head == src:
            return mk_app(tgt, *[_repair(s, ctx, a) for a in args])

    # raw references to a changing source carrier are not annotated
    if s._carrier_changes:
        a_head, _ = spine(s.cfg.side_a.carrier)
        if isinstance(a_head, IndRef):
            ind = a_head.name
            if isinstance(head, (CtorRef, ElimRef)) and head.ind == ind:
                raise ImproperAnnotation(
                    f"unannotated reference {head!r} to the source type")

    # structural rules
    match t:
        case App(f, a):
            return App(_repair(s, ctx, f), _repair(s, ctx, a))
        case Lam(x, d, b):
            return Lam(x, _repair(s, ctx, d),
                       _repair(s, ctx.push(x, d), b))
        case Pi(x, d, b):
            return Pi(x, _repair(s, ctx, d),
                      _repair(s, ctx.push(x, d), b))
        case ConstRef(name):
            if name in s.cfg.opaque_names:
                return t
            d = s.src_env.definition(name)
            if d is not None and d.opaque_for_repair:
                return t
            if name in s.cache:
                return ConstRef(s.cache[name])
            if s.is_config_free(name):
                return t
            raise MissingDependency(name)
        case _:
            return t


def infer_annotations(session: RepairSession, t: Term) -> Term:
    """Validate that equality forms in t are fully applied where the target
    relation is not definitional equality; returns t unchanged."""
    s = session

    def bad(u: Term, args: list[Term], reason: str):
        raise ImproperAnnotation(f"{reason}: {u!r}")

    def go(u: Term):
        head, args = spine(u)
        kind = _eq_spine_kind(head)
        if kind is not None and s._setoid_change:
            if kind == "eq" and len(args) not in (0, 3):
                # partial: tolerated only while it cannot become the carrier
                if args and _mentions_carrier(s, args[0]):
                    bad(u, args, "partially applied equality over the source type")
            if kind == "eq" and len(args) == 0:
                bad(u, args, "bare unapplied equality")
            if kind == "refl":
                if len(args) == 0:
                    bad(u, args, "bare unapplied reflexivity")
                if len(args) == 1 and _mentions_carrier(s, args[0]):
                    bad(u, args, "partially applied reflexivity over the source type")
            if kind in ("elim", "elim_rev") and len(args) < 6 and args and \
                    _mentions_carrier(s, args[0]):
                bad(u, args, "partially applied equality eliminator over the source type")
        if head == ConstRef(START_REWRITE) and len(args) != 6:
            bad(u, args, "partially applied START_REWRITE")
        for a in args:
            go(a)
        match head:
            case Lam(_, d, b) | Pi(_, d, b):
                go(d)
                go(b)
            case _:
                pass

    go(t)
    return t


def _mentions_carrier(session: RepairSession, t: Term) -> bool:
    src = session.cfg.side_a.carrier
    from .kernel import contains
    if contains(t, src):
        return True
    head, _ = spine(src)
    if isinstance(head, IndRef):
        from .kernel import inductives_in
        return head.name in inductives_in(t)
    return False


def repair_constant(session: RepairSession, src_name: str, tgt_name: str,
                    generate_properness: bool = True) -> None:
    """Repair one definition into the target environment and cache it."""
    d = session.src_env.definition(src_name)
    if d is None:
        raise IllTyped(f"{src_name!r} is not a definition")
    infer_annotations(session, d.type)
    infer_annotations(session, d.body)
    ty2 = _repair(session, Context(), d.type)
    body2 = _repair(session, Context(), d.body)
    from .kernel import declare_definition
    session.tgt_env = declare_definition(session.tgt_env, tgt_name, ty2, body2)
    session.cache[src_name] = tgt_name
    if generate_properness:
        _maybe_generate_proper(session, tgt_name)


def _maybe_generate_proper(session: RepairSession, tgt_name: str) -> None:
    from .kernel.terms import occurs_var
    from .propergen import generate_proper
    from .setoids import ProperInstance, proper_statement, register_proper
    env = session.tgt_env
    d = env.definition(tgt_name)
    arg_types: list[Term] = []
    rest = d.type
    while isinstance(rest, Pi):
        if occurs_var(rest.codomain, 0):
            return  # dependent function type: properness is out of scope
        arg_types.append(rest.domain)
        rest = rest.codomain
    if not arg_types:
        return
    try:
        result_sort = whnf(env, Context(), infer_type(env, Context(), rest))
    except IllTyped:
        return
    if result_sort == PROP:
        return  # a theorem, not a function
    rels = [lookup_relation(env, session.registry, ty) for ty in arg_types]
    out_rel = lookup_relation(env, session.registry, rest)
    if all(r.is_default for r in rels) and out_rel.is_default:
        return
    signature = [r.relation for r in rels] + [out_rel.relation]
    inst = generate_proper(env, session.registry, ConstRef(tgt_name), signature)
    if inst is None:
        return
    proof_name = f"{tgt_name}_proper"
    if session.tgt_env.definition(proof_name) is not None:
        return
    stmt = proper_statement(env, inst.subject, list(inst.signature))
    from .kernel import declare_definition
    session.tgt_env = declare_definition(session.tgt_env, proof_name, stmt, inst.proof)
    named = ProperInstance(inst.subject, inst.signature, ConstRef(proof_name))
    session.registry = register_proper(session.tgt_env, session.registry, named)
    session.generated_instances.append(proof_name)
