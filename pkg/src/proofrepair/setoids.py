"""Registry of equivalence relations and properness instances.

A registry is a value: registering returns a new registry. Lookup for an
unregistered carrier falls back to the default setoid built from equality.
"""
from __future__ import annotations

from dataclasses import dataclass

from .kernel import (
    App, ConstRef, Context, CtorRef, GlobalEnv, IllTyped, IndRef, Lam, Pi,
    Term, Var, PROP, conv, check_type, infer_type, mk_app, spine, whnf,
)


class DuplicateCarrier(Exception):
    pass


@dataclass(frozen=True)
class SetoidSpec:
    carrier: Term
    relation: Term
    refl: Term
    sym: Term
    trans: Term
    decider: Term | None = None
    is_default: bool = False


@dataclass(frozen=True)
class ProperInstance:
    subject: Term
    signature: tuple[Term, ...]
    proof: Term


@dataclass(frozen=True)
class Registry:
    setoids: tuple[SetoidSpec, ...] = ()
    instances: tuple[ProperInstance, ...] = ()

    def with_setoid(self, spec: SetoidSpec) -> "Registry":
        return Registry(self.setoids + (spec,), self.instances)

    def with_instance(self, inst: ProperInstance) -> "Registry":
        return Registry(self.setoids, self.instances + (inst,))

    def newest_first(self):
        return reversed(self.instances)


def _rel_statement(carrier: Term) -> Term:
    return Pi("_", carrier, Pi("_", carrier, PROP))


def _refl_statement(spec_carrier: Term, relation: Term) -> Term:
    from .kernel import lift
    return Pi("c", spec_carrier,
              mk_app(lift(relation, 1), Var(0), Var(0)))


def _sym_statement(c: Term, r: Term) -> Term:
    from .kernel import lift
    return Pi("a", c, Pi("b", lift(c, 1),
              Pi("_", mk_app(lift(r, 2), Var(1), Var(0)),
                 mk_app(lift(r, 3), Var(1), Var(2)))))


def _trans_statement(c: Term, r: Term) -> Term:
    from .kernel import lift
    return Pi("a", c, Pi("b", lift(c, 1), Pi("c2", lift(c, 2),
              Pi("_", mk_app(lift(r, 3), Var(2), Var(1)),
              Pi("_", mk_app(lift(r, 4), Var(2), Var(1)),
                 mk_app(lift(r, 5), Var(4), Var(2)))))))


def mk_respectful(env: GlobalEnv, signature: list[Term]) -> Term:
    """Fold a relation chain R1 ==> ... ==> Rn into one relation term."""
    if not signature:
        raise ValueError("empty signature")
    if len(signature) == 1:
        return signature[0]
    r1 = signature[0]
    rest = mk_respectful(env, signature[1:])
    a = relation_carrier(env, r1)
    b = relation_carrier(env, rest)
    return mk_app(ConstRef("respectful"), a, b, r1, rest)


def relation_carrier(env: GlobalEnv, rel: Term) -> Term:
    ty = whnf(env, Context(), infer_type(env, Context(), rel))
    if not isinstance(ty, Pi):
        raise IllTyped(f"not a relation: {rel!r}")
    return ty.domain


def proper_statement(env: GlobalEnv, subject: Term, signature: list[Term]) -> Term:
    rel = mk_respectful(env, list(signature))
    return mk_app(rel, subject, subject)


def register_setoid(env: GlobalEnv, registry: Registry, spec: SetoidSpec) -> Registry:
    ctx = Context()
    for other in registry.setoids:
        if carriers_match(env, other.carrier, spec.carrier):
            raise DuplicateCarrier(f"{spec.carrier!r}")
    check_type(env, ctx, spec.relation, _rel_statement(spec.carrier))
    check_type(env, ctx, spec.refl, _refl_statement(spec.carrier, spec.relation))
    check_type(env, ctx, spec.sym, _sym_statement(spec.carrier, spec.relation))
    check_type(env, ctx, spec.trans, _trans_statement(spec.carrier, spec.relation))
    if spec.decider is not None:
        boolT = IndRef("bool")
        check_type(env, ctx, spec.decider,
                   Pi("_", spec.carrier, Pi("_", spec.carrier, boolT)))
    registry = registry.with_setoid(spec)
    # every equivalence respects itself into iff; register that instance now
    iff = ConstRef("iff")
    inst = ProperInstance(
        subject=spec.relation,
        signature=(spec.relation, spec.relation, iff),
        proof=mk_app(ConstRef("equiv_self_proper"),
                     spec.carrier, spec.relation, spec.sym, spec.trans),
    )
    return register_proper(env, registry, inst)


def register_proper(env: GlobalEnv, registry: Registry, inst: ProperInstance) -> Registry:
    stmt = proper_statement(env, inst.subject, list(inst.signature))
    check_type(env, Context(), inst.proof, stmt)
    return registry.with_instance(inst)


def _whnf_no_opaque(env: GlobalEnv, t: Term):
    """Weak head reduction that refuses to unfold repair-opaque constants."""
    from .kernel import spine as _spine, mk_app as _mk_app
    from .kernel.reduce import iota_contract
    from .kernel.terms import App, ConstRef, ElimRef, Lam, subst as _subst
    while True:
        head, args = _spine(t)
        if isinstance(head, Lam) and args:
            t = _mk_app(_subst(head.body, args[0]), *args[1:])
            continue
        if isinstance(head, ConstRef):
            d = env.definition(head.name)
            if d is not None and not d.opaque_for_repair:
                t = _mk_app(d.body, *args)
                continue
            return t
        if isinstance(head, ElimRef):
            contracted = iota_contract(env, head, args)
            if contracted is not None:
                t = contracted
                continue
        return t


def carriers_match(env: GlobalEnv, a: Term, b: Term) -> bool:
    """Carrier comparison for registry lookup: conversion, except that
    repair-opaque aliases are never unfolded (so an opaque alias of a carrier
    does not hit the carrier's setoid)."""
    if a == b:
        return True
    from .kernel import spine as _spine
    from .kernel.terms import Pi as _Pi
    wa = _whnf_no_opaque(env, a)
    wb = _whnf_no_opaque(env, b)
    if wa == wb:
        return True
    if isinstance(wa, _Pi) and isinstance(wb, _Pi):
        return carriers_match(env, wa.domain, wb.domain) and             carriers_match(env, wa.codomain, wb.codomain)
    ha, aa = _spine(wa)
    hb, ab = _spine(wb)
    if ha != hb or len(aa) != len(ab):
        return False
    return all(carriers_match(env, x, y) for x, y in zip(aa, ab))


def default_setoid(env: GlobalEnv, carrier: Term) -> SetoidSpec:
    """The equality setoid on a carrier, with canonical witnesses."""
    eqc = App(IndRef("eq"), carrier)
    return SetoidSpec(
        carrier=carrier,
        relation=eqc,
        refl=App(CtorRef("eq", 0), carrier),
        sym=App(ConstRef("eq_sym"), carrier),
        trans=App(ConstRef("eq_trans"), carrier),
        decider=None,
        is_default=True,
    )


def lookup_relation(env: GlobalEnv, registry: Registry, carrier: Term) -> SetoidSpec:
    for spec in registry.setoids:
        if carriers_match(env, spec.carrier, carrier):
            return spec
    return default_setoid(env, carrier)


def lookup_by_relation(env: GlobalEnv, registry: Registry, relation: Term) -> SetoidSpec | None:
    ctx = Context()
    for spec in registry.setoids:
        if spec.relation == relation or conv(env, ctx, spec.relation, relation):
            return spec
    head, args = spine(relation)
    if head == IndRef("eq") and len(args) == 1:
        return default_setoid(env, args[0])
    return None


def match_subject(env: GlobalEnv, ctx: Context, inst: ProperInstance,
                  head: Term, args: list[Term]) -> list[Term] | None:
    """Remaining arguments if inst.subject is a prefix of head applied to args."""
    s_head, s_args = spine(inst.subject)
    if s_head != head or len(s_args) > len(args):
        return None
    for sa, a in zip(s_args, args):
        if sa != a and not conv(env, ctx, sa, a):
            return None
    rest = args[len(s_args):]
    if len(rest) != len(inst.signature) - 1:
        return None
    return rest


def initial_registry(env: GlobalEnv) -> Registry:
    """Registry with (Prop, iff) and (bool, eq) pre-registered."""
    reg = Registry()
    iff = ConstRef("iff")
    reg = register_setoid(env, reg, SetoidSpec(
        carrier=PROP, relation=iff,
        refl=ConstRef("iff_refl"), sym=ConstRef("iff_sym"),
        trans=ConstRef("iff_trans")))
    # iff respects iff on both sides; used when rewriting inside iff goals
    reg = register_proper(env, reg, ProperInstance(
        subject=iff, signature=(iff, iff, iff), proof=ConstRef("iff_iff_proper")))
    boolT = IndRef("bool")
    spec = default_setoid(env, boolT)
    reg = register_setoid(env, reg, SetoidSpec(
        carrier=boolT, relation=spec.relation, refl=spec.refl,
        sym=spec.sym, trans=spec.trans, decider=ConstRef("eqb_bool"),
        is_default=True))
    return reg


def eq_iff_instance(env: GlobalEnv, carrier: Term) -> ProperInstance:
    """Virtual instance (eq C ==> eq C ==> iff) (eq C) for default setoids."""
    eqc = App(IndRef("eq"), carrier)
    return ProperInstance(
        subject=eqc, signature=(eqc, eqc, ConstRef("iff")),
        proof=App(ConstRef("eq_iff_proper"), carrier))
