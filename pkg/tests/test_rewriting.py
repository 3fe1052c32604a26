import pytest

from proofrepair.kernel import (
    App, ConstRef, Context, IndRef, Lam, Var, conv, infer_type, mk_app,
    constants_in,
)
from proofrepair.rewriting import (
    NoOccurrence, NoProperInstance, RewriteRequest, congruence_search,
    implication, lift_rewrite, lift_setoid_rewrite,
)
from proofrepair.surface import parse_term, resolve


def _t(env, src):
    return resolve(env, parse_term(src))


def test_congruence_search_transitivity_shape(zgz):
    # over GZ with e : eq_GZ x y, the goal eq_GZ x z rewrites to eq_GZ y z
    env, reg = zgz.env, zgz.registry
    ctx = Context().push("x", ConstRef("GZ")).push("y", ConstRef("GZ")) \
                   .push("z", ConstRef("GZ")) \
                   .push("e", mk_app(ConstRef("eq_GZ"), Var(2), Var(1)))
    x, y, z, e = Var(3), Var(2), Var(1), Var(0)
    goal = mk_app(ConstRef("eq_GZ"), x, z)
    req = RewriteRequest(env, ctx, reg, ConstRef("GZ"), x, y, e, goal)
    impl = congruence_search(req)
    got = infer_type(env, ctx, impl)
    expected = mk_app(ConstRef("eq_GZ"), y, z)
    assert conv(env, ctx, got,
                resolve_arrow(env, ctx, goal, expected))


def resolve_arrow(env, ctx, a, b):
    from proofrepair.kernel import Pi, lift
    return Pi("_", a, lift(b, 1))


def test_congruence_search_through_function_instance(zgz):
    # rewriting inside addGZ needs the generated addGZ_proper instance
    env, reg = zgz.env, zgz.registry
    ctx = Context().push("x", ConstRef("GZ")).push("y", ConstRef("GZ")) \
                   .push("z", ConstRef("GZ")) \
                   .push("e", mk_app(ConstRef("eq_GZ"), Var(2), Var(1)))
    x, y, z, e = Var(3), Var(2), Var(1), Var(0)
    goal = mk_app(ConstRef("eq_GZ"), mk_app(ConstRef("addGZ"), x, z), z)
    req = RewriteRequest(env, ctx, reg, ConstRef("GZ"), x, y, e, goal)
    impl = congruence_search(req)
    infer_type(env, ctx, impl)


def test_congruence_search_no_occurrence(zgz):
    env, reg = zgz.env, zgz.registry
    ctx = Context().push("x", ConstRef("GZ")).push("y", ConstRef("GZ")) \
                   .push("e", mk_app(ConstRef("eq_GZ"), Var(1), Var(0)))
    x, y, e = Var(2), Var(1), Var(0)
    goal = mk_app(ConstRef("eq_GZ"), y, y)
    req = RewriteRequest(env, ctx, reg, ConstRef("GZ"), x, y, e, goal)
    with pytest.raises(NoOccurrence):
        congruence_search(req)


def test_lift_rewrite_constant_motive_is_no_occurrence(zgz):
    env, reg = zgz.env, zgz.registry
    ctx = Context().push("x", ConstRef("GZ")).push("y", ConstRef("GZ")) \
                   .push("e", mk_app(ConstRef("eq_GZ"), Var(1), Var(0))) \
                   .push("h", IndRef("True"))
    x, y, e, h = Var(3), Var(2), Var(1), Var(0)
    motive = Lam("_", ConstRef("GZ"), IndRef("True"))
    with pytest.raises(NoOccurrence):
        lift_rewrite(env, ctx, reg, ConstRef("GZ"), x, motive, h, y, e)


def test_lift_setoid_rewrite_both_positions(queues):
    # rewriting q by eq_queue q q' in eq_queue q q yields eq_queue q' q'
    env, reg = queues.env, queues.registry
    ctx = Context().push("q", ConstRef("TLQ")).push("q2", ConstRef("TLQ")) \
                   .push("e", mk_app(ConstRef("eq_queue"), Var(1), Var(0))) \
                   .push("t", mk_app(ConstRef("eq_queue"), Var(2), Var(2)))
    q, q2, e, t = Var(3), Var(2), Var(1), Var(0)
    goal = mk_app(ConstRef("eq_queue"), q, q)
    out = lift_setoid_rewrite(env, ctx, reg, ConstRef("TLQ"), q, q2, e, goal, t)
    got = infer_type(env, ctx, out)
    assert conv(env, ctx, got, mk_app(ConstRef("eq_queue"), q2, q2))


def test_oracle_purity_outputs_reference_only_bodied_constants(zgz):
    env, reg = zgz.env, zgz.registry
    ctx = Context().push("x", ConstRef("GZ")).push("y", ConstRef("GZ")) \
                   .push("z", ConstRef("GZ")) \
                   .push("e", mk_app(ConstRef("eq_GZ"), Var(2), Var(1)))
    x, y, z, e = Var(3), Var(2), Var(1), Var(0)
    goal = mk_app(ConstRef("eq_GZ"), mk_app(ConstRef("addGZ"), x, z), z)
    req = RewriteRequest(env, ctx, reg, ConstRef("GZ"), x, y, e, goal)
    impl = congruence_search(req)
    for name in constants_in(impl):
        d = env.definition(name)
        assert d is not None and d.body is not None


def test_all_occurrence_semantics(zgz):
    from proofrepair.kernel import replace
    env, reg = zgz.env, zgz.registry
    ctx = Context().push("x", ConstRef("GZ")).push("y", ConstRef("GZ")) \
                   .push("e", mk_app(ConstRef("eq_GZ"), Var(1), Var(0)))
    x, y, e = Var(2), Var(1), Var(0)
    goal = mk_app(ConstRef("eq_GZ"), mk_app(ConstRef("sucGZ"), x), x)
    req = RewriteRequest(env, ctx, reg, ConstRef("GZ"), x, y, e, goal)
    impl = congruence_search(req)
    got = infer_type(env, ctx, impl)
    from proofrepair.kernel import Pi
    assert isinstance(got, Pi)
    assert got.codomain == replace(
        mk_app(ConstRef("eq_GZ"), mk_app(ConstRef("sucGZ"), Var(3)), Var(3)),
        Var(3), Var(2))


def test_raw_equality_rewrites_use_transport(prelude):
    env, reg = prelude.env, prelude._registry()
    natT = IndRef("nat")
    eqnat = App(IndRef("eq"), natT)
    ctx = Context().push("a", natT).push("b", natT) \
                   .push("e", mk_app(eqnat, Var(1), Var(0)))
    a, b, e = Var(2), Var(1), Var(0)
    goal = mk_app(eqnat, mk_app(ConstRef("plus"), a, a), mk_app(ConstRef("plus"), a, a))
    impl = implication(env, ctx, reg, natT, a, b, e, goal)
    infer_type(env, ctx, impl)
