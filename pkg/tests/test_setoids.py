import pytest

from proofrepair.kernel import (
    App, ConstRef, Context, CtorRef, IndRef, Pi, Var, PROP, check_type,
    conv, infer_type, mk_app,
)
from proofrepair.setoids import (
    DuplicateCarrier, ProperInstance, SetoidSpec, lookup_by_relation,
    lookup_relation, mk_respectful, proper_statement, register_proper,
    register_setoid,
)
from proofrepair.surface import parse_term, resolve


def test_registered_gz_setoid_found(zgz):
    spec = lookup_relation(zgz.env, zgz.registry, ConstRef("GZ"))
    assert spec.relation == ConstRef("eq_GZ")
    assert not spec.is_default


def test_registered_queue_setoid_found(queues):
    spec = lookup_relation(queues.env, queues.registry, ConstRef("TLQ"))
    assert spec.relation == ConstRef("eq_queue")


def test_lookup_unregistered_defaults_to_equality(zgz):
    spec = lookup_relation(zgz.env, zgz.registry, IndRef("nat"))
    assert spec.is_default
    assert spec.relation == App(IndRef("eq"), IndRef("nat"))


def test_prop_setoid_preregistered_with_iff(prelude):
    spec = lookup_relation(prelude.env, prelude._registry(), PROP)
    assert spec.relation == ConstRef("iff")


def test_register_wrong_relation_sort_rejected(prelude):
    env = prelude.env
    reg = prelude._registry()
    bad = SetoidSpec(
        carrier=IndRef("nat"),
        relation=resolve(env, parse_term("fun (a : nat) (b : nat) => nat")),
        refl=ConstRef("add_0_r"), sym=ConstRef("add_0_r"),
        trans=ConstRef("add_0_r"))
    with pytest.raises(Exception):
        register_setoid(env, reg, bad)


def test_duplicate_carrier_rejected(zgz):
    spec = lookup_relation(zgz.env, zgz.registry, ConstRef("GZ"))
    with pytest.raises(DuplicateCarrier):
        register_setoid(zgz.env, zgz.registry, spec)


def test_mk_respectful_single_is_relation(zgz):
    assert mk_respectful(zgz.env, [ConstRef("eq_GZ")]) == ConstRef("eq_GZ")


def test_mk_respectful_chain_matches_instance_statement(zgz):
    env = zgz.env
    sig = [ConstRef("eq_GZ"), ConstRef("eq_GZ"), ConstRef("eq_GZ")]
    stmt = proper_statement(env, ConstRef("addGZ"), sig)
    # the auto-generated instance proof checks at this statement
    check_type(env, Context(), ConstRef("addGZ_proper"), stmt)


def test_respectful_statement_for_nat_rect_style(zgz):
    env = zgz.env
    eqnat = App(IndRef("eq"), IndRef("nat"))
    rel = mk_respectful(env, [eqnat, ConstRef("eq_GZ"), ConstRef("eq_GZ")])
    infer_type(env, Context(), rel)


def test_register_proper_wrong_statement_rejected(zgz):
    env = zgz.env
    inst = ProperInstance(
        subject=ConstRef("sucGZ"),
        signature=(ConstRef("eq_GZ"), ConstRef("eq_GZ")),
        proof=ConstRef("eq_GZ_refl"))
    with pytest.raises(Exception):
        register_proper(env, zgz.registry, inst)


def test_witnesses_recheck_for_every_registered_setoid(poly):
    env = poly.env
    from proofrepair.kernel import lift
    for spec in poly.registry.setoids:
        c, r = spec.carrier, spec.relation
        check_type(env, Context(), r, Pi("_", c, Pi("_", lift(c, 1), PROP)))
        check_type(env, Context(), spec.refl,
                   Pi("c", c, mk_app(lift(r, 1), Var(0), Var(0))))


def test_registry_lookup_pure(zgz):
    a = lookup_relation(zgz.env, zgz.registry, ConstRef("GZ"))
    b = lookup_relation(zgz.env, zgz.registry, ConstRef("GZ"))
    assert a == b


def test_lookup_by_relation(zgz):
    spec = lookup_by_relation(zgz.env, zgz.registry, ConstRef("eq_GZ"))
    assert spec is not None and spec.carrier == ConstRef("GZ")


def test_opaque_alias_does_not_hit_carrier_setoid(poly):
    env = poly.env
    spec = lookup_relation(env, poly.registry, ConstRef("opaque_list"))
    assert spec.is_default
    # while the carrier itself, convertible to the same list type, does
    spec2 = lookup_relation(env, poly.registry, ConstRef("CLPoly"))
    assert spec2.relation == ConstRef("eq_CLPoly")
