"""Repair configurations: paired constructors, eliminators, and iota rules.

A configuration pairs two carriers through a common shape inductive. Each
side supplies constructors and a Type-valued eliminator mirroring the shape,
plus per-constructor iota laws (forward and reverse) whose statements are
derived mechanically here and validated against the supplied proofs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .kernel import (
    App, ConstRef, Context, CtorRef, ElimRef, GlobalEnv, IllTyped, IndRef, Lam, Pi,
    Sort, Term, Var, PROP, TYPE1, check_type, conv, infer_type, lift,
    mk_app, mk_lam_telescope, mk_pi_telescope, pi_telescope, subst, whnf,
)
from .kernel.env import InductiveDecl
from .setoids import Registry, SetoidSpec, lookup_relation

FWD = "fwd"
REV = "rev"


@dataclass(frozen=True)
class ConfigurationSide:
    carrier: Term
    setoid: SetoidSpec
    dep_constr: tuple[Term, ...]
    dep_rec: Term
    dep_elim_prop: Term | None = None
    iota_fwd: tuple[Term, ...] = ()
    iota_rev: tuple[Term, ...] = ()
    applied_elim_pairs: tuple[tuple[Term, Term], ...] = ()


@dataclass(frozen=True)
class Configuration:
    name: str
    shape: str
    shape_args: tuple[Term, ...]
    side_a: ConfigurationSide
    side_b: ConfigurationSide
    equiv_fwd: Term | None = None
    equiv_rev: Term | None = None
    opaque_names: frozenset[str] = frozenset()

    def with_pair(self, motive_a, applied_a, motive_b, applied_b) -> "Configuration":
        sa = self.side_a
        sb = self.side_b
        sa = ConfigurationSide(sa.carrier, sa.setoid, sa.dep_constr, sa.dep_rec,
                               sa.dep_elim_prop, sa.iota_fwd, sa.iota_rev,
                               sa.applied_elim_pairs + ((motive_a, applied_a),))
        sb = ConfigurationSide(sb.carrier, sb.setoid, sb.dep_constr, sb.dep_rec,
                               sb.dep_elim_prop, sb.iota_fwd, sb.iota_rev,
                               sb.applied_elim_pairs + ((motive_b, applied_b),))
        return Configuration(self.name, self.shape, self.shape_args, sa, sb,
                             self.equiv_fwd, self.equiv_rev, self.opaque_names)


@dataclass
class ValidationEntry:
    component: str
    ok: bool
    message: str = ""


@dataclass
class ValidationReport:
    entries: list[ValidationEntry] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def add(self, component: str, ok: bool, message: str = ""):
        self.entries.append(ValidationEntry(component, ok, message))

    def failures(self) -> list[ValidationEntry]:
        return [e for e in self.entries if not e.ok]


def instantiated_telescope(env: GlobalEnv, shape: InductiveDecl,
                           shape_args: tuple[Term, ...], j: int,
                           carrier: Term) -> list[tuple[str, Term, bool]]:
    """Constructor j's argument telescope with shape parameters instantiated
    and recursive positions replaced by the side's carrier."""
    ctor = shape.ctors[j]
    recpos = shape.recursive_positions(ctor)
    out: list[tuple[str, Term, bool]] = []
    for i, (name, ty) in enumerate(ctor.args):
        if recpos[i]:
            out.append((name, carrier, True))
            continue
        t = ty
        for arg in reversed(shape_args):
            t = subst(t, arg, i)
        out.append((name, t, False))
    return out


class _Scope:
    """A growing binder stack addressed by absolute position."""

    def __init__(self):
        self.binders: list[tuple[str, Term]] = []

    @property
    def depth(self) -> int:
        return len(self.binders)

    def push(self, name: str, ty: Term) -> int:
        self.binders.append((name, ty))
        return self.depth - 1

    def var(self, abs_pos: int) -> Term:
        return Var(self.depth - 1 - abs_pos)

    def pi_from(self, mark: int, body: Term) -> Term:
        segment = self.binders[mark:]
        del self.binders[mark:]
        return mk_pi_telescope(segment, body)

    def close_pi(self, body: Term) -> Term:
        return mk_pi_telescope(self.binders, body)


def _motive_kind(env: GlobalEnv, dep_rec: Term, carrier: Term) -> tuple[str, Sort]:
    ty = whnf(env, Context(), infer_type(env, Context(), dep_rec))
    if not isinstance(ty, Pi):
        raise IllTyped(f"eliminator has no motive binder: {dep_rec!r}")
    dom = whnf(env, Context(), ty.domain)
    if isinstance(dom, Sort):
        return "constant", dom
    if isinstance(dom, Pi):
        cod = whnf(env, Context(), dom.codomain)
        if isinstance(cod, Sort) and conv(env, Context(), dom.domain, carrier):
            return "dependent", cod
    raise IllTyped(f"unrecognized motive binder {dom!r}")


def _iota_or_rec_scheme(env: GlobalEnv, cfg: Configuration,
                        side: ConfigurationSide, want: str,
                        ctor_index: int = 0, direction: str = FWD) -> Term:
    """Shared builder for the expected dep_rec type and the iota statements.

    want is "rec" (full recursor type) or "iota" (the iota statement for
    ctor_index and direction).
    """
    shape = env.inductive(cfg.shape)
    kind, msort = _motive_kind(env, side.dep_rec, side.carrier)
    carrier = side.carrier
    sc = _Scope()

    motive = sc.push("P", Pi("_", carrier, msort) if kind == "dependent" else msort)

    def motive_app(value: Term) -> Term:
        return App(sc.var(motive), value) if kind == "dependent" else sc.var(motive)

    method_abs: list[int] = []
    for jj in range(len(shape.ctors)):
        tele = instantiated_telescope(env, shape, cfg.shape_args, jj, carrier)
        mark = sc.depth
        arg_abs: list[int] = []
        for (name, ty, is_rec) in tele:
            # ty's free vars reference previous telescope args (innermost 0)
            abs_table = arg_abs[::-1]

            def remap(m, table=tuple(abs_table), d=sc.depth):
                return d - 1 - table[m]

            from .kernel.typing import _rename_free
            ty2 = _rename_free(ty, remap)
            pos = sc.push(name, ty2)
            arg_abs.append(pos)
            if is_rec:
                sc.push(name + "_ih", motive_app(sc.var(pos)))
        if kind == "dependent":
            concl = motive_app(mk_app(side.dep_constr[jj],
                                      *[sc.var(a) for a in arg_abs]))
        else:
            concl = sc.var(motive)
        method_ty = sc.pi_from(mark, concl)
        method_abs.append(sc.push(f"f_{shape.ctors[jj].name}", method_ty))

    def rec_applied(target: Term) -> Term:
        return mk_app(side.dep_rec, sc.var(motive),
                      *[sc.var(m) for m in method_abs], target)

    if want == "rec":
        x = sc.push("x", carrier)
        return sc.close_pi(motive_app(sc.var(x)))

    # iota statement for ctor_index
    j = ctor_index
    tele = instantiated_telescope(env, shape, cfg.shape_args, j, carrier)
    arg_abs = []
    for (name, ty, is_rec) in tele:
        abs_table = arg_abs[::-1]

        def remap(m, table=tuple(abs_table), d=sc.depth):
            return d - 1 - table[m]

        from .kernel.typing import _rename_free
        sc_pos = sc.push(name, _rename_free(ty, remap))
        arg_abs.append(sc_pos)

    constr_applied = mk_app(side.dep_constr[j], *[sc.var(a) for a in arg_abs])
    q = sc.push("Q", Pi("_", motive_app(constr_applied), TYPE1))

    # method j applied to the arguments, with recursive eliminations inserted
    recflags = [is_rec for (_, _, is_rec) in tele]
    method_call_args: list[Term] = []
    for a, is_rec in zip(arg_abs, recflags):
        method_call_args.append(sc.var(a))
        if is_rec:
            method_call_args.append(rec_applied(sc.var(a)))
    unfolded = mk_app(sc.var(method_abs[j]), *method_call_args)
    folded = rec_applied(mk_app(side.dep_constr[j], *[sc.var(a) for a in arg_abs]))

    if direction == FWD:
        hyp, concl = unfolded, folded
    else:
        hyp, concl = folded, unfolded
    body = Pi("h", App(sc.var(q), hyp), App(lift(sc.var(q), 1), lift(concl, 1)))
    return sc.close_pi(body)


def derive_iota_type(env: GlobalEnv, cfg: Configuration, side: ConfigurationSide,
                     ctor_index: int, direction: str) -> Term:
    """The expected statement of the iota rule for one constructor/direction."""
    return _iota_or_rec_scheme(env, cfg, side, "iota", ctor_index, direction)


def expected_rec_type(env: GlobalEnv, cfg: Configuration,
                      side: ConfigurationSide) -> Term:
    return _iota_or_rec_scheme(env, cfg, side, "rec")


def expected_constr_type(env: GlobalEnv, cfg: Configuration,
                         side: ConfigurationSide, j: int) -> Term:
    shape = env.inductive(cfg.shape)
    tele = instantiated_telescope(env, shape, cfg.shape_args, j, side.carrier)
    sc = _Scope()
    arg_abs = []
    for (name, ty, is_rec) in tele:
        abs_table = arg_abs[::-1]

        def remap(m, table=tuple(abs_table), d=sc.depth):
            return d - 1 - table[m]

        from .kernel.typing import _rename_free
        arg_abs.append(sc.push(name, _rename_free(ty, remap)))
    return sc.close_pi(lift(side.carrier, sc.depth))


def expected_elim_prop_type(env: GlobalEnv, cfg: Configuration,
                            side: ConfigurationSide, with_properness: bool) -> Term:
    shape = env.inductive(cfg.shape)
    carrier = side.carrier
    rel = side.setoid.relation
    sc = _Scope()
    motive = sc.push("P", Pi("_", carrier, PROP))
    if with_properness:
        # forall x y : C, R x y -> iff (P x) (P y), stated under the P binder
        stmt = Pi("x", carrier,
              Pi("y", carrier,
              Pi("_", mk_app(rel, Var(1), Var(0)),
                 mk_app(ConstRef("iff"), App(Var(3), Var(2)), App(Var(3), Var(1))))))
        sc.push("p", stmt)
    for jj in range(len(shape.ctors)):
        tele = instantiated_telescope(env, shape, cfg.shape_args, jj, carrier)
        mark = sc.depth
        arg_abs = []
        for (name, ty, is_rec) in tele:
            abs_table = arg_abs[::-1]

            def remap(m, table=tuple(abs_table), d=sc.depth):
                return d - 1 - table[m]

            from .kernel.typing import _rename_free
            pos = sc.push(name, _rename_free(ty, remap))
            arg_abs.append(pos)
            if is_rec:
                sc.push(name + "_ih", App(sc.var(motive), sc.var(pos)))
        concl = App(sc.var(motive), mk_app(side.dep_constr[jj],
                                           *[sc.var(a) for a in arg_abs]))
        sc.push(f"f_{shape.ctors[jj].name}", sc.pi_from(mark, concl))
    x = sc.push("x", carrier)
    return sc.close_pi(App(sc.var(motive), sc.var(x)))


def validate_configuration(env: GlobalEnv, cfg: Configuration) -> ValidationReport:
    """Check every component against its mechanically derived expected type."""
    report = ValidationReport()
    ctx = Context()
    try:
        shape = env.inductive(cfg.shape)
    except IllTyped as e:
        report.add("shape", False, str(e))
        return report
    report.add("shape", True)
    n = len(shape.ctors)
    try:
        ka, _ = _motive_kind(env, cfg.side_a.dep_rec, cfg.side_a.carrier)
        kb, _ = _motive_kind(env, cfg.side_b.dep_rec, cfg.side_b.carrier)
        report.add("motiveKind", ka == kb,
                   "" if ka == kb else f"side A is {ka}, side B is {kb}")
    except Exception as e:
        report.add("motiveKind", False, str(e))
    for label, side in (("A", cfg.side_a), ("B", cfg.side_b)):
        if len(side.dep_constr) != n:
            report.add(f"side{label}.depConstr", False,
                       f"expected {n} constructors, got {len(side.dep_constr)}")
            continue
        for j in range(n):
            try:
                expected = expected_constr_type(env, cfg, side, j)
                check_type(env, ctx, side.dep_constr[j], expected)
                report.add(f"side{label}.depConstr[{j}]", True)
            except Exception as e:  # noqa: BLE001 - report carries failures
                report.add(f"side{label}.depConstr[{j}]", False, str(e))
        try:
            expected = expected_rec_type(env, cfg, side)
            check_type(env, ctx, side.dep_rec, expected)
            report.add(f"side{label}.depRec", True)
        except Exception as e:
            report.add(f"side{label}.depRec", False, str(e))
        if side.dep_elim_prop is not None:
            ok = False
            msgs = []
            for withp in (False, True):
                try:
                    expected = expected_elim_prop_type(env, cfg, side, withp)
                    check_type(env, ctx, side.dep_elim_prop, expected)
                    ok = True
                    break
                except Exception as e:
                    msgs.append(str(e))
            report.add(f"side{label}.depElimProp", ok, "" if ok else "; ".join(msgs))
        if len(side.iota_fwd) != n or len(side.iota_rev) != n:
            report.add(f"side{label}.iota", False,
                       f"expected {n} fwd and {n} rev iota proofs")
        else:
            for j in range(n):
                for direction, proofs in ((FWD, side.iota_fwd), (REV, side.iota_rev)):
                    try:
                        expected = derive_iota_type(env, cfg, side, j, direction)
                        check_type(env, ctx, proofs[j], expected)
                        report.add(f"side{label}.iota[{j}].{direction}", True)
                    except Exception as e:
                        report.add(f"side{label}.iota[{j}].{direction}", False, str(e))
    if cfg.equiv_fwd is not None:
        try:
            check_type(env, ctx, cfg.equiv_fwd,
                       Pi("_", cfg.side_a.carrier, lift(cfg.side_b.carrier, 1)))
            report.add("equivFwd", True)
        except Exception as e:
            report.add("equivFwd", False, str(e))
    if cfg.equiv_rev is not None:
        try:
            check_type(env, ctx, cfg.equiv_rev,
                       Pi("_", cfg.side_b.carrier, lift(cfg.side_a.carrier, 1)))
            report.add("equivRev", True)
        except Exception as e:
            report.add("equivRev", False, str(e))
    for i, (ma, aa) in enumerate(cfg.side_a.applied_elim_pairs):
        try:
            infer_type(env, ctx, ma)
            infer_type(env, ctx, aa)
            mb, ab = cfg.side_b.applied_elim_pairs[i]
            infer_type(env, ctx, mb)
            infer_type(env, ctx, ab)
            report.add(f"appliedElimPairs[{i}]", True)
        except Exception as e:
            report.add(f"appliedElimPairs[{i}]", False, str(e))
    return report


def trivial_configuration(env: GlobalEnv, registry: Registry,
                          ind_name: str) -> Configuration:
    """Identity configuration on a non-parameterized inductive: both sides use
    the native constructors and recursor, and repair is the identity."""
    decl = env.inductive(ind_name)
    if decl.n_params:
        raise IllTyped("trivial configurations cover non-parameterized inductives")
    carrier = IndRef(ind_name)
    spec = lookup_relation(env, registry, carrier)
    side = ConfigurationSide(
        carrier=carrier,
        setoid=spec,
        dep_constr=tuple(CtorRef(ind_name, j) for j in range(len(decl.ctors))),
        dep_rec=ElimRef(ind_name, TYPE1),
    )
    cfg = Configuration(f"trivial_{ind_name}", ind_name, (), side, side,
                        Lam("x", carrier, Var(0)), Lam("x", carrier, Var(0)))
    iotas_f, iotas_r = [], []
    for j in range(len(decl.ctors)):
        for direction, acc in ((FWD, iotas_f), (REV, iotas_r)):
            stmt = derive_iota_type(env, cfg, side, j, direction)
            tele, _ = pi_telescope(stmt)
            proof = mk_lam_telescope(tele, Var(0))  # the h binder is last
            acc.append(proof)
    side = ConfigurationSide(carrier, spec, side.dep_constr, side.dep_rec,
                             None, tuple(iotas_f), tuple(iotas_r))
    return Configuration(f"trivial_{ind_name}", ind_name, (), side, side,
                         Lam("x", carrier, Var(0)), Lam("x", carrier, Var(0)))
