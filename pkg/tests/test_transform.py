import random

import pytest

from proofrepair.config import trivial_configuration
from proofrepair.kernel import (
    App, ConstRef, Context, CtorRef, ElimRef, IndRef, Lam, Pi, Sort, Var,
    PROP, TYPE1, conv, infer_type, inductives_in, constants_in, mk_app,
)
from proofrepair.surface import parse_term, resolve
from proofrepair.transform import (
    ImproperAnnotation, MissingDependency, RepairSession, infer_annotations,
    repair_constant, repair_env, repair_term,
)


def _session(driver, cfg_name):
    return driver.session(cfg_name)


def test_fig3_addition_repair(natbin):
    env = natbin.env
    addn = env.definition("addN")
    expected_body = resolve(env, parse_term(
        "fun (a : N) (b : N) => depElimN (fun (_n : N) => N -> N)"
        " (fun (b2 : N) => b2)"
        " (fun (a2 : N) (IH : N -> N) (b2 : N) => depConstrNSuc (IH b2)) a b"))
    assert addn.body == expected_body
    assert conv(env, Context(), addn.type, resolve(env, parse_term("N -> N -> N")))


def test_repair_env_empty_and_single(zgz):
    s = _session(zgz, "zgz")
    assert repair_env(s, Context()).entries == ()
    ctx = Context().push("z", IndRef("Z"))
    out = repair_env(s, ctx)
    assert out.entries[0][1] == ConstRef("GZ")


def test_repair_env_with_equation(zgz):
    s = _session(zgz, "zgz")
    ctx = Context().push("z", IndRef("Z")).push(
        "h", mk_app(IndRef("eq"), IndRef("Z"), Var(0), Var(0)))
    out = repair_env(s, ctx)
    assert out.entries[1][1] == mk_app(ConstRef("eq_GZ"), Var(0), Var(0))
    # the repaired telescope checks entry-wise
    env, prefix = zgz.env, Context()
    for (name, ty, _b) in out.entries:
        infer_type(env, prefix, ty)
        prefix = prefix.push(name, ty)


def test_statement_equality_becomes_relation(zgz):
    env = zgz.env
    got = env.definition("add0LGZ").type
    expected = resolve(env, parse_term(
        "forall (z : GZ), eq_GZ z (addGZ (depConstrGZPos 0) z)"))
    assert conv(env, Context(), got, expected)


def test_missing_dependency(zgz):
    from proofrepair.kernel import declare_definition
    env = zgz.env
    env2 = declare_definition(
        env, "needsHelper",
        resolve(env, parse_term("Z -> Z")),
        resolve(env, parse_term("fun (z : Z) => sucZ (sucZ z)")))
    env2 = declare_definition(
        env2, "usesHelper",
        resolve(env2, parse_term("Z -> Z")),
        resolve(env2, parse_term("fun (z : Z) => needsHelper z")))
    s = RepairSession(zgz.configs["zgz"], env2, env2, zgz.registry)
    with pytest.raises(MissingDependency):
        repair_constant(s, "usesHelper", "usesHelperGZ")


def test_unannotated_source_constructor_rejected(zgz):
    s = _session(zgz, "zgz")
    t = App(CtorRef("Z", 0), CtorRef("nat", 0))
    with pytest.raises(ImproperAnnotation):
        repair_term(s, Context(), t)


def test_improper_annotation_bare_equality(zgz):
    s = _session(zgz, "zgz")
    t = Lam("F", Pi("_", IndRef("Z"), Pi("_", IndRef("Z"), PROP)),
            CtorRef("unit", 0) if "unit" in zgz.env.inductives else Var(0))
    bare = App(t, IndRef("eq"))
    with pytest.raises(ImproperAnnotation):
        infer_annotations(s, bare)


def test_partial_relation_application_rejected(zgz):
    s = _session(zgz, "zgz")
    partial = App(IndRef("eq"), IndRef("Z"))
    with pytest.raises(ImproperAnnotation):
        infer_annotations(s, mk_app(Lam("r", infer_type(zgz.env, Context(), partial), Var(0)), partial))


def test_clean_terms_pass_annotation_check(zgz):
    s = _session(zgz, "zgz")
    t = zgz.env.definition("add0LZ").body
    assert infer_annotations(s, t) == t


def test_no_residue_in_repaired_outputs(zgz):
    env = zgz.env
    forbidden_consts = set()
    forbidden_inds = {"Z"}
    for src, tgt in zgz.caches["zgz"].items():
        if src != tgt:
            forbidden_consts.add(src)
    for comp in ("depConstrZPos", "depConstrZNegSuc", "depRecZ",
                 "depElimPropZ", "iotaZPosFwd", "iotaZPosRev",
                 "iotaZNegSucFwd", "iotaZNegSucRev"):
        forbidden_consts.add(comp)
    for src, tgt in zgz.caches["zgz"].items():
        d = env.definition(tgt)
        for t in (d.type, d.body):
            assert not (constants_in(t) & forbidden_consts), tgt
            assert not (inductives_in(t) & forbidden_inds), tgt


def _random_term(rng, depth=0):
    """A closed, well-typed term over nat built by typed construction."""
    def go_nat(d):
        choice = rng.randrange(6 if d < 3 else 2)
        if choice == 0:
            return CtorRef("nat", 0)
        if choice == 1:
            return App(CtorRef("nat", 1), go_nat(d + 1))
        if choice == 2:
            return mk_app(ConstRef("plus"), go_nat(d + 1), go_nat(d + 1))
        if choice == 3:
            return mk_app(ConstRef("mult"), go_nat(d + 1), go_nat(d + 1))
        if choice == 4:
            return App(Lam("x", IndRef("nat"),
                           mk_app(ConstRef("plus"), Var(0), go_nat(d + 1))),
                       go_nat(d + 1))
        return mk_app(ElimRef("nat", TYPE1),
                      Lam("_", IndRef("nat"), IndRef("nat")),
                      go_nat(d + 1),
                      Lam("m", IndRef("nat"), Lam("ih", IndRef("nat"),
                          App(CtorRef("nat", 1), Var(0)))),
                      go_nat(d + 1))

    kind = rng.randrange(4)
    if kind == 0:
        return go_nat(0)
    if kind == 1:
        return Lam("x", IndRef("nat"), mk_app(ConstRef("plus"), Var(0), go_nat(1)))
    if kind == 2:
        return Pi("x", IndRef("nat"),
                  mk_app(IndRef("eq"), IndRef("nat"), Var(0), go_nat(1)))
    return mk_app(CtorRef("eq", 0), IndRef("nat"), go_nat(0))


def test_trivial_configuration_repair_is_alpha_identity(prelude):
    env = prelude.env
    cfg = trivial_configuration(env, prelude._registry(), "nat")
    s = RepairSession(cfg, env, env, prelude._registry())
    rng = random.Random(42)
    for _ in range(200):
        t = _random_term(rng)
        infer_type(env, Context(), t)
        assert repair_term(s, Context(), t) == t
    # and on every prelude definition
    for name in env.order:
        d = env.definition(name)
        if d is None:
            continue
        assert repair_term(s, Context(), d.body, recheck=False) == d.body
        assert repair_term(s, Context(), d.type, recheck=False) == d.type


def test_structurality_on_rule_free_application(zgz):
    s = _session(zgz, "zgz")
    f = resolve(zgz.env, parse_term("plus 1"))
    x = resolve(zgz.env, parse_term("2"))
    assert repair_term(s, Context(), App(f, x)) == \
        App(repair_term(s, Context(), f), repair_term(s, Context(), x))


def test_type_preservation_all_corpus_repairs(zgz, queues, poly, natbin, unit2):
    from proofrepair.transform import _repair
    for driver in (zgz, queues, poly, natbin, unit2):
        for cfg_name, cache in driver.caches.items():
            s = driver.session(cfg_name)
            for src, tgt in cache.items():
                if src == tgt:
                    continue
                src_d = driver.env.definition(src)
                tgt_d = driver.env.definition(tgt)
                repaired_ty = _repair(s, Context(), src_d.type)
                got = infer_type(driver.env, Context(), tgt_d.body)
                assert conv(driver.env, Context(), got, repaired_ty), (src, tgt)
