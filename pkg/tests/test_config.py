import pytest

from proofrepair.config import (
    FWD, REV, Configuration, ConfigurationSide, derive_iota_type,
    trivial_configuration, validate_configuration,
)
from proofrepair.kernel import ConstRef, Context, IllTyped, check_type
from proofrepair.surface import parse_term, resolve


def test_natbin_configuration_validates(natbin):
    cfg = natbin.configs["natbin"]
    report = validate_configuration(natbin.env, cfg)
    assert report.ok, [e.component for e in report.failures()]


def test_zgz_configuration_validates(zgz):
    report = validate_configuration(zgz.env, zgz.configs["zgz"])
    assert report.ok, [(e.component, e.message) for e in report.failures()]


def test_queue_configuration_validates(queues):
    report = validate_configuration(queues.env, queues.configs["queues"])
    assert report.ok, [(e.component, e.message) for e in report.failures()]


def test_poly_sigma_configuration_validates(poly):
    report = validate_configuration(poly.env, poly.configs["poly"])
    assert report.ok, [(e.component, e.message) for e in report.failures()]


def test_derived_iota_statements_reproduce_the_listings(natbin):
    env = natbin.env
    cfg = natbin.configs["natbin"]
    fwd = derive_iota_type(env, cfg, cfg.side_b, 1, FWD)
    rev = derive_iota_type(env, cfg, cfg.side_b, 1, REV)
    listing_fwd = resolve(env, parse_term(
        "forall (P : N -> Type1) (PO : P depConstrNZero)"
        " (PS : forall (x : N), P x -> P (depConstrNSuc x)) (n : N)"
        " (Q : P (depConstrNSuc n) -> Type1),"
        " Q (PS n (depElimN P PO PS n)) ->"
        " Q (depElimN P PO PS (depConstrNSuc n))"))
    listing_rev = resolve(env, parse_term(
        "forall (P : N -> Type1) (PO : P depConstrNZero)"
        " (PS : forall (x : N), P x -> P (depConstrNSuc x)) (n : N)"
        " (Q : P (depConstrNSuc n) -> Type1),"
        " Q (depElimN P PO PS (depConstrNSuc n)) ->"
        " Q (PS n (depElimN P PO PS n))"))
    assert fwd == listing_fwd
    assert rev == listing_rev


def test_supplied_iota_proofs_check_at_derived_types(zgz):
    env = zgz.env
    cfg = zgz.configs["zgz"]
    for side in (cfg.side_a, cfg.side_b):
        for j in range(2):
            check_type(env, Context(), side.iota_fwd[j],
                       derive_iota_type(env, cfg, side, j, FWD))
            check_type(env, Context(), side.iota_rev[j],
                       derive_iota_type(env, cfg, side, j, REV))


def test_native_side_iota_is_inhabited_by_identity(natbin):
    # on the unary side the iota statements hold by conversion alone
    env = natbin.env
    cfg = natbin.configs["natbin"]
    assert cfg.side_a.iota_fwd[1] == ConstRef("iotaNatSucFwd")


def test_mutating_one_component_flips_exactly_that_entry(natbin):
    env = natbin.env
    cfg = natbin.configs["natbin"]
    b = cfg.side_b
    broken = ConfigurationSide(
        b.carrier, b.setoid, b.dep_constr, b.dep_rec, b.dep_elim_prop,
        (b.iota_fwd[0], ConstRef("iotaNZeroFwd")),  # wrong proof for ctor 1
        b.iota_rev, b.applied_elim_pairs)
    bad = Configuration(cfg.name, cfg.shape, cfg.shape_args, cfg.side_a,
                        broken, cfg.equiv_fwd, cfg.equiv_rev, cfg.opaque_names)
    report = validate_configuration(env, bad)
    bad_entries = [e.component for e in report.failures()]
    assert bad_entries == ["sideB.iota[1].fwd"]


def test_arity_mismatch_reported(natbin):
    env = natbin.env
    cfg = natbin.configs["natbin"]
    b = cfg.side_b
    broken = ConfigurationSide(b.carrier, b.setoid, b.dep_constr[:1],
                               b.dep_rec, None, b.iota_fwd, b.iota_rev)
    bad = Configuration(cfg.name, cfg.shape, cfg.shape_args, cfg.side_a,
                        broken, cfg.equiv_fwd, cfg.equiv_rev)
    report = validate_configuration(env, bad)
    assert any("depConstr" in e.component for e in report.failures())


def test_trivial_configuration_validates(prelude):
    cfg = trivial_configuration(prelude.env, prelude._registry(), "nat")
    report = validate_configuration(prelude.env, cfg)
    assert report.ok, [(e.component, e.message) for e in report.failures()]


def test_trivial_configuration_iota_proofs_are_trivial(prelude):
    cfg = trivial_configuration(prelude.env, prelude._registry(), "nat")
    # the canonical proofs inhabit the derived statements
    for side in (cfg.side_a,):
        for j in range(2):
            check_type(prelude.env, Context(), side.iota_fwd[j],
                       derive_iota_type(prelude.env, cfg, side, j, FWD))
