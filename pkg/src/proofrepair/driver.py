"""Execute parsed declaration files against the engine.

The driver owns the growing environment and registry, tracks configurations
and their repair caches, and records every declaration it adds so a run can
be emitted as a textual development.
"""
from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field
from pathlib import Path

from .config import (
    Configuration, ConfigurationSide, validate_configuration,
)
from .correspond import (
    CheckPair, CorrespondencePlan, MissingDecider, check_correspondence,
    check_pointwise,
)
from .kernel import (
    ConstRef, Context, GlobalEnv, IllTyped, IndRef, Pi, Term, Var,
    declare_definition, declare_inductive, infer_type, initial_env, mk_app,
    mk_lam_telescope, mk_pi_telescope, pi_telescope, spine, whnf,
)
from .kernel.env import CtorDecl, InductiveDecl
from .propergen import generate_proper, split_rel_app
from .rewriting import lift_setoid_rewrite
from .setoids import (
    ProperInstance, Registry, SetoidSpec, initial_registry, lookup_by_relation,
    proper_statement, register_proper, register_setoid,
)
from .surface.ast import (
    GenSpec, IConfiguration, IDefinition, IGenProper, IInductive, IInstance,
    ILift, IPort, IRegisterPair, IRequire, ISetoid, Item, Plan,
)
from .surface.lexer import ParseError
from .surface.parser import parse_items, parse_plan
from .surface.resolve import resolve, resolve_sort
from .transform import RepairSession, repair_constant


class DriverError(Exception):
    def __init__(self, msg: str, line: int = 0, source: str = ""):
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if source else ""
        super().__init__(f"{where}{msg}")


class ConfigInvalid(DriverError):
    def __init__(self, report, line=0, source=""):
        self.report = report
        msgs = "; ".join(f"{e.component}: {e.message}" for e in report.failures())
        super().__init__(f"configuration does not validate: {msgs}", line, source)


@dataclass
class Driver:
    env: GlobalEnv = field(default_factory=initial_env)
    registry: Registry | None = None
    configs: dict = field(default_factory=dict)
    caches: dict = field(default_factory=dict)
    loaded: set = field(default_factory=set)
    emitted: list = field(default_factory=list)  # (name, kind)
    pointwise_budget_default: int = 4

    def session(self, cfg_name: str) -> RepairSession:
        cfg = self.configs[cfg_name]
        s = RepairSession(cfg, self.env, self.env, self._registry())
        s.cache = self.caches.setdefault(cfg_name, {})
        return s

    def _registry(self) -> Registry:
        if self.registry is None:
            self.registry = initial_registry(self.env)
        return self.registry

    # -- loading --------------------------------------------------------------
    def load_file(self, path: str | Path):
        path = Path(path)
        key = path.resolve().as_posix()
        if key in self.loaded:
            return
        self.loaded.add(key)
        try:
            items = parse_items(path.read_text())
        except ParseError as e:
            raise DriverError(str(e), source=str(path))
        for item in items:
            try:
                self.run_item(item, base_dir=path.parent)
            except DriverError:
                raise
            except Exception as e:
                raise DriverError(f"{type(e).__name__}: {e}", item.line, str(path))

    def load_module(self, name: str, base_dir: Path | None = None):
        if base_dir is not None:
            candidate = base_dir / f"{name}.pr"
            if candidate.exists():
                self.load_file(candidate)
                return
        pkg = importlib.resources.files("proofrepair") / "corpus" / f"{name}.pr"
        with importlib.resources.as_file(pkg) as p:
            self.load_file(p)

    # -- items -----------------------------------------------------------------
    def run_item(self, item: Item, base_dir: Path | None = None):
        match item:
            case IRequire(_, module):
                self.load_module(module, base_dir)
            case IInductive():
                self._do_inductive(item)
            case IDefinition():
                body = resolve(self.env, item.body)
                ty = resolve(self.env, item.type)
                self.env = declare_definition(self.env, item.name, ty, body,
                                              opaque_for_repair=item.opaque)
                self.emitted.append((item.name, "definition"))
            case ISetoid():
                spec = SetoidSpec(
                    carrier=resolve(self.env, item.carrier),
                    relation=resolve(self.env, item.relation),
                    refl=resolve(self.env, item.refl),
                    sym=resolve(self.env, item.sym),
                    trans=resolve(self.env, item.trans),
                    decider=resolve(self.env, item.decider)
                    if item.decider is not None else None)
                self.registry = register_setoid(self.env, self._registry(), spec)
            case IInstance():
                sig = [resolve(self.env, s) for s in item.signature]
                subject = resolve(self.env, item.subject)
                proof = resolve(self.env, item.proof)
                stmt = proper_statement(self.env, subject, sig)
                self.env = declare_definition(self.env, item.name, stmt, proof)
                self.emitted.append((item.name, "instance"))
                inst = ProperInstance(subject, tuple(sig), ConstRef(item.name))
                self.registry = register_proper(self.env, self._registry(), inst)
            case IConfiguration():
                self._do_configuration(item)
            case ILift():
                self._do_lift(item)
            case IRegisterPair():
                cfg = self.configs[item.config]
                self.configs[item.config] = cfg.with_pair(
                    resolve(self.env, item.motive_a),
                    resolve(self.env, item.applied_a),
                    resolve(self.env, item.motive_b),
                    resolve(self.env, item.applied_b))
            case IGenProper():
                self._do_genproper(item)
            case IPort():
                self._do_port(item)
            case _:
                raise DriverError(f"cannot execute {item!r}", item.line)

    def _do_inductive(self, item: IInductive):
        params: list[tuple[str, Term]] = []
        names: list[str] = []
        for (pname, pty) in item.params:
            params.append((pname, resolve(self.env, pty, tuple(names))))
            names.append(pname)
        sort = resolve_sort(item.sort)
        shell = InductiveDecl(item.name, tuple(params), sort, ())
        probe_env = self.env.with_inductive(shell)
        ctors: list[CtorDecl] = []
        for (cname, cty) in item.ctors:
            full = resolve(probe_env, cty, tuple(names))
            tele, result = pi_telescope(full)
            expected = shell.self_applied(len(tele))
            if result != expected:
                raise DriverError(
                    f"constructor {cname} must conclude in {item.name} applied "
                    f"to its parameters", item.line)
            ctors.append(CtorDecl(cname, tuple(tele)))
        decl = InductiveDecl(item.name, tuple(params), sort, tuple(ctors))
        self.env = declare_inductive(self.env, decl)
        self.emitted.append((item.name, "inductive"))

    def _side(self, item_side, n_ctors: int) -> ConfigurationSide:
        from .setoids import lookup_relation
        carrier = resolve(self.env, item_side.carrier)
        spec = lookup_relation(self.env, self._registry(), carrier)
        iotas = [resolve(self.env, i) for i in item_side.iotas]
        if len(iotas) != 2 * n_ctors:
            raise DriverError(
                f"expected {2 * n_ctors} iota proofs (fwd/rev per constructor), "
                f"got {len(iotas)}")
        return ConfigurationSide(
            carrier=carrier,
            setoid=spec,
            dep_constr=tuple(resolve(self.env, c) for c in item_side.constrs),
            dep_rec=resolve(self.env, item_side.rec),
            dep_elim_prop=resolve(self.env, item_side.elimprop)
            if item_side.elimprop is not None else None,
            iota_fwd=tuple(iotas[0::2]),
            iota_rev=tuple(iotas[1::2]),
        )

    def _do_configuration(self, item: IConfiguration):
        shape = self.env.inductive(item.shape)
        n = len(shape.ctors)
        cfg = Configuration(
            name=item.name,
            shape=item.shape,
            shape_args=tuple(resolve(self.env, a) for a in item.shape_args),
            side_a=self._side(item.side_a, n),
            side_b=self._side(item.side_b, n),
            equiv_fwd=resolve(self.env, item.equiv_fwd)
            if item.equiv_fwd is not None else None,
            equiv_rev=resolve(self.env, item.equiv_rev)
            if item.equiv_rev is not None else None,
            opaque_names=frozenset(item.opaques),
        )
        for (ma, aa, mb, ab) in item.pairs:
            cfg = cfg.with_pair(resolve(self.env, ma), resolve(self.env, aa),
                                resolve(self.env, mb), resolve(self.env, ab))
        report = validate_configuration(self.env, cfg)
        if not report.ok:
            raise ConfigInvalid(report, item.line)
        self.configs[item.name] = cfg

    def _do_lift(self, item: ILift):
        if item.config not in self.configs:
            raise DriverError(f"unknown configuration {item.config!r}", item.line)
        s = self.session(item.config)
        repair_constant(s, item.source, item.target)
        self.env = s.tgt_env
        self.registry = s.registry
        self.emitted.append((item.target, "definition"))
        for name in s.generated_instances:
            self.emitted.append((name, "instance"))

    def _do_genproper(self, item: IGenProper):
        sig = [resolve(self.env, s) for s in item.signature]
        inst = generate_proper(self.env, self._registry(), ConstRef(item.fn), sig)
        if inst is None:
            raise ProperFailed(item.fn)
        name = f"{item.fn}_proper"
        stmt = proper_statement(self.env, inst.subject, list(inst.signature))
        self.env = declare_definition(self.env, name, stmt, inst.proof)
        named = ProperInstance(inst.subject, inst.signature, ConstRef(name))
        self.registry = register_proper(self.env, self._registry(), named)
        self.emitted.append((name, "instance"))

    def _do_port(self, item: IPort):
        env = self.env
        lemma = env.definition(item.lemma)
        thm = env.definition(item.source_thm)
        replaced = env.definition(item.replaced)
        if lemma is None or thm is None or replaced is None:
            raise DriverError("port needs declared theorem, lemma, and functions",
                              item.line)
        # the lemma concludes R (f args) (g args); find its relation
        _, concl = pi_telescope(lemma.type)
        parsed = split_rel_app(concl)
        if parsed is None:
            raise DriverError("the porting lemma does not conclude in a relation",
                              item.line)
        rel, _, _ = parsed
        spec = lookup_by_relation(env, self._registry(), rel)
        if spec is None or spec.decider is None:
            raise MissingDecider(f"no decider for {rel!r}")
        arity = 0
        t = replaced.type
        arg_specs: list[GenSpec] = []
        while isinstance(t, Pi):
            arg_specs.append(_type_genspec(env, t.domain, item.budget))
            arity += 1
            t = t.codomain
        gate = check_pointwise(env, ConstRef(item.replaced),
                               ConstRef(item.replacement),
                               tuple(arg_specs), spec.decider,
                               budget=500, seed=0)
        if not gate.ok:
            raise DriverError(
                f"pointwise gate failed for {item.replaced} ~ {item.replacement}"
                f" (counterexample: {gate.counterexample})", item.line)
        # intro the theorem's binders and rewrite each applied occurrence
        tele, body = pi_telescope(thm.type)
        ctx = Context()
        for (bn, bt) in tele:
            ctx = ctx.push(bn, bt)
        subject: Term = mk_app(ConstRef(item.source_thm),
                               *[Var(len(tele) - 1 - i) for i in range(len(tele))])
        goal = body
        while True:
            occ = _find_app(goal, ConstRef(item.replaced), arity)
            if occ is None:
                break
            _, oargs = spine(occ)
            rhs = mk_app(ConstRef(item.replacement), *oargs)
            proof = mk_app(ConstRef(item.lemma), *oargs)
            subject = lift_setoid_rewrite(env, ctx, self._registry(),
                                          spec.carrier, occ, rhs, proof,
                                          goal, subject)
            from .kernel import replace
            goal = replace(goal, occ, rhs)
        new_ty = mk_pi_telescope(tele, goal)
        new_body = mk_lam_telescope(tele, subject)
        self.env = declare_definition(self.env, item.name, new_ty, new_body)
        self.emitted.append((item.name, "definition"))

    # -- correspondence ---------------------------------------------------------
    def run_plan(self, plan: Plan, base_dir: Path | None = None,
                 budget: int | None = None, seed: int | None = None):
        for mod in plan.loads:
            self.load_module(mod, base_dir)
        pairs = []
        for p in plan.pairs:
            arg_fwds = tuple(ConstRef(v) if v is not None else None
                             for (_, v) in p.args)
            pairs.append(CheckPair(
                src_fn=ConstRef(p.src), tgt_fn=ConstRef(p.tgt),
                arg_specs=tuple(s for (s, _) in p.args),
                arg_fwds=arg_fwds,
                result_fwd=ConstRef(p.result_via) if p.result_via else None,
                decider=ConstRef(p.decider),
                label=(p.src, p.tgt)))
        cplan = CorrespondencePlan(tuple(pairs),
                                   budget if budget is not None else plan.budget,
                                   seed if seed is not None else plan.seed)
        return check_correspondence(self.env, cplan)


class ProperFailed(Exception):
    def __init__(self, fn: str):
        self.fn = fn
        super().__init__(f"failed to generate a properness proof for {fn}")


def _type_genspec(env: GlobalEnv, ty: Term, budget: int) -> GenSpec:
    w = whnf(env, Context(), ty)
    head, args = spine(w)
    if head == IndRef("nat"):
        return GenSpec("nat", max=budget)
    if head == IndRef("bool"):
        return GenSpec("bool")
    if head == IndRef("prod") and len(args) == 2:
        return GenSpec("prod", children=(_type_genspec(env, args[0], budget),
                                         _type_genspec(env, args[1], budget)))
    if head == IndRef("list") and len(args) == 1:
        return GenSpec("list", length=min(budget, 4),
                       children=(_type_genspec(env, args[0], budget),))
    if isinstance(head, IndRef) and not args:
        return GenSpec("ind", ind=head.name, max=budget)
    raise DriverError(f"cannot derive an input generator for {ty!r}")


def _find_app(t: Term, head: Term, arity: int) -> Term | None:
    """Leftmost-outermost subterm that is head applied to exactly arity args."""
    h, args = spine(t)
    if h == head and len(args) == arity:
        return t
    from .kernel import App, Lam, Pi
    if isinstance(t, App):
        return _find_app(t.fn, head, arity) or _find_app(t.arg, head, arity)
    if isinstance(t, (Lam, Pi)):
        # occurrences under binders cannot be rewritten; skip them
        return None
    return None
